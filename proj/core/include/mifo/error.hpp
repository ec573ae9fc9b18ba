#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mifo {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data violates a structural requirement (shape, mask, names, values).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A parameter is out of its valid range for the given data.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine cannot produce a result (zero variance, divergence, ...).
class ComputeError : public Error {
 public:
  using Error::Error;
};

/// Read of a masked entry through the public accessor.
class MaskedAccessError : public DataError {
 public:
  MaskedAccessError(std::size_t row, std::size_t col)
      : DataError("read of missing entry at (" + std::to_string(row) + ", " +
                  std::to_string(col) + ")"),
        row_(row),
        col_(col) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

/// CSV field that is neither a number nor the NA token. Row and column are
/// 1-based data coordinates (the header is not counted as a row).
class ParseError : public DataError {
 public:
  ParseError(std::string source, std::size_t row, std::size_t col, std::string field)
      : DataError(source + ": cannot parse field \"" + field + "\" at row " +
                  std::to_string(row) + ", column " + std::to_string(col)),
        row_(row),
        col_(col),
        field_(std::move(field)) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t row_;
  std::size_t col_;
  std::string field_;
};

}  // namespace mifo
