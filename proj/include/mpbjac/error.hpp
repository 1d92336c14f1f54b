#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mpbjac {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class PrecisionMismatch : public Error {
 public:
  using Error::Error;
};

/// Raised when narrowing a finite value would exceed the target's finite range.
class PrecisionOverflow : public Error {
 public:
  PrecisionOverflow(std::size_t index, double value)
      : Error("value " + std::to_string(value) + " at index " +
              std::to_string(index) + " overflows the target precision"),
        index_(index),
        value_(value) {}

  std::size_t index() const noexcept { return index_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t index_;
  double value_;
};

/// Malformed input file (Matrix Market, config, trace).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A diagonal entry required by a preconditioner or transform is zero or absent.
class MissingDiagonal : public Error {
 public:
  explicit MissingDiagonal(std::size_t row)
      : Error("row " + std::to_string(row) + " has a zero or missing diagonal entry"),
        row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace mpbjac
