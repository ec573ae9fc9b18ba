#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mifo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// A (row, col) coordinate, 0-based.
struct Cell {
  std::size_t row = 0;
  std::size_t col = 0;

  auto operator<=>(const Cell&) const = default;
};

/// Row index sets of one column: where it is observed and where it is missing.
struct ColumnSplit {
  std::size_t target_col = 0;
  std::vector<std::size_t> rows_obs;
  std::vector<std::size_t> rows_mis;
};

/// n x p real matrix with an explicit missingness mask.
///
/// Masked entries are stored as NaN and cannot be read through at(); callers
/// that need a dense view go through filled() or an imputer. Observed entries
/// must be finite. The object is immutable once built.
class DataMatrix {
 public:
  /// Complete matrix (empty mask).
  DataMatrix(Matrix values, std::vector<std::string> col_names);
  /// `mask(r, c) == true` marks (r, c) as missing; the value there is ignored.
  DataMatrix(Matrix values, Mask mask, std::vector<std::string> col_names);

  std::size_t rows() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  const std::vector<std::string>& col_names() const noexcept { return names_; }
  const Mask& mask() const noexcept { return mask_; }

  bool is_missing(std::size_t row, std::size_t col) const;
  /// Observed value; throws MaskedAccessError on a masked entry.
  double at(std::size_t row, std::size_t col) const;

  std::size_t missing_count(std::size_t col) const;
  std::size_t total_missing() const noexcept { return total_missing_; }
  bool has_missing() const noexcept { return total_missing_ > 0; }
  /// Masked positions in row-major order.
  std::vector<Cell> missing_cells() const;
  ColumnSplit split(std::size_t col) const;

  /// Mean of the observed entries of `col`; DataError if none are observed.
  double observed_mean(std::size_t col) const;

  /// Dense copy with masked entries replaced by `fill[col]`.
  Matrix filled(std::span<const double> fill) const;
  /// Dense copy of a mask-free matrix; DataError if anything is masked.
  Matrix dense() const;
  /// Dense copy with NaN at masked positions.
  const Matrix& values_or_nan() const noexcept { return values_; }

  /// Same column names, new complete values.
  DataMatrix with_values(Matrix values) const;

  /// Bitwise equality of shape, names, mask and observed values.
  friend bool identical(const DataMatrix& a, const DataMatrix& b);

 private:
  void validate();

  Matrix values_;
  Mask mask_;
  std::vector<std::string> names_;
  std::size_t total_missing_ = 0;
};

/// "x1", "x2", ..., "xp".
std::vector<std::string> default_column_names(std::size_t p);

}  // namespace mifo
