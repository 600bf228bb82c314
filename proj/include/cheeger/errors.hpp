#pragma once

#include <stdexcept>
#include <string>

namespace cheeger {

// Base of every error raised by the library. The C API maps each subclass to
// a status code; the CLI maps status codes to process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent run configuration (unknown key, bad grid, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A requested C^p order that the library does not support (p >= 2).
class UnsupportedOrderError : public ConfigError {
 public:
  explicit UnsupportedOrderError(int order);
  int order() const noexcept { return order_; }

 private:
  int order_;
};

// Point (or FD stencil, or action image) outside the chart domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Numerical breakdown: non-SPD matrix, ill-conditioned solve, rank trouble.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Rank of the Killing operator cannot be decided: the point is too close to a
// singular orbit.
class DegeneratePointError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Unwritable output or unreadable input.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cheeger
