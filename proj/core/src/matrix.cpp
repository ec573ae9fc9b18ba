#include "mifo/matrix.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_set>

#include "mifo/error.hpp"

namespace mifo {

DataMatrix::DataMatrix(Matrix values, std::vector<std::string> col_names)
    : values_(std::move(values)),
      mask_(Mask::Constant(values_.rows(), values_.cols(), false)),
      names_(std::move(col_names)) {
  validate();
}

DataMatrix::DataMatrix(Matrix values, Mask mask, std::vector<std::string> col_names)
    : values_(std::move(values)), mask_(std::move(mask)), names_(std::move(col_names)) {
  validate();
}

void DataMatrix::validate() {
  if (values_.rows() < 2 || values_.cols() < 1) {
    throw DataError("data matrix needs at least 2 rows and 1 column, got " +
                    std::to_string(values_.rows()) + "x" + std::to_string(values_.cols()));
  }
  if (mask_.rows() != values_.rows() || mask_.cols() != values_.cols()) {
    throw DataError("mask shape does not match value shape");
  }
  if (names_.size() != cols()) {
    throw DataError("expected " + std::to_string(cols()) + " column names, got " +
                    std::to_string(names_.size()));
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : names_) {
    if (name.empty()) throw DataError("empty column name");
    if (!seen.insert(name).second) throw DataError("duplicate column name \"" + name + "\"");
  }
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  total_missing_ = 0;
  for (Eigen::Index c = 0; c < values_.cols(); ++c) {
    for (Eigen::Index r = 0; r < values_.rows(); ++r) {
      if (mask_(r, c)) {
        values_(r, c) = nan;
        ++total_missing_;
      } else if (!std::isfinite(values_(r, c))) {
        throw DataError("non-finite observed value at (" + std::to_string(r) + ", " +
                        std::to_string(c) + ")");
      }
    }
  }
}

bool DataMatrix::is_missing(std::size_t row, std::size_t col) const {
  if (row >= rows() || col >= cols()) {
    throw DataError("index (" + std::to_string(row) + ", " + std::to_string(col) +
                    ") out of range");
  }
  return mask_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
}

double DataMatrix::at(std::size_t row, std::size_t col) const {
  if (is_missing(row, col)) throw MaskedAccessError(row, col);
  return values_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
}

std::size_t DataMatrix::missing_count(std::size_t col) const {
  return static_cast<std::size_t>(mask_.col(static_cast<Eigen::Index>(col)).count());
}

std::vector<Cell> DataMatrix::missing_cells() const {
  std::vector<Cell> cells;
  cells.reserve(total_missing_);
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < cols(); ++c) {
      if (mask_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))) cells.push_back({r, c});
    }
  }
  return cells;
}

ColumnSplit DataMatrix::split(std::size_t col) const {
  if (col >= cols()) throw DataError("column " + std::to_string(col) + " out of range");
  ColumnSplit s;
  s.target_col = col;
  for (std::size_t r = 0; r < rows(); ++r) {
    (mask_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) ? s.rows_mis : s.rows_obs)
        .push_back(r);
  }
  return s;
}

double DataMatrix::observed_mean(std::size_t col) const {
  double sum = 0.0;
  std::size_t count = 0;
  const auto c = static_cast<Eigen::Index>(col);
  for (Eigen::Index r = 0; r < values_.rows(); ++r) {
    if (!mask_(r, c)) {
      sum += values_(r, c);
      ++count;
    }
  }
  if (count == 0) throw DataError("column \"" + names_.at(col) + "\" is fully missing");
  return sum / static_cast<double>(count);
}

Matrix DataMatrix::filled(std::span<const double> fill) const {
  if (fill.size() != cols()) throw DataError("fill vector length does not match column count");
  Matrix out = values_;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      if (mask_(r, c)) out(r, c) = fill[static_cast<std::size_t>(c)];
    }
  }
  return out;
}

Matrix DataMatrix::dense() const {
  if (has_missing()) throw DataError("matrix has missing entries");
  return values_;
}

DataMatrix DataMatrix::with_values(Matrix values) const {
  return DataMatrix(std::move(values), names_);
}

bool identical(const DataMatrix& a, const DataMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.names_ != b.names_) return false;
  if ((a.mask_ != b.mask_).any()) return false;
  for (Eigen::Index c = 0; c < a.values_.cols(); ++c) {
    for (Eigen::Index r = 0; r < a.values_.rows(); ++r) {
      if (a.mask_(r, c)) continue;
      // Bitwise: distinguishes -0.0 from 0.0.
      if (std::bit_cast<std::uint64_t>(a.values_(r, c)) !=
          std::bit_cast<std::uint64_t>(b.values_(r, c))) {
        return false;
      }
    }
  }
  return true;
}

std::vector<std::string> default_column_names(std::size_t p) {
  std::vector<std::string> names;
  names.reserve(p);
  for (std::size_t i = 1; i <= p; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

}  // namespace mifo
