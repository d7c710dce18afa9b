#pragma once

#include <stdexcept>
#include <string>

namespace mnol {

/// Base of every error thrown by the library. The CLI maps `ConfigError`,
/// `ShapeError` and `DomainError` to exit code 2 and `NumericalError` to 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Array or vector dimensions do not match what an operation expects.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent or incomplete configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Divergence, underflow, or any other non-finite result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace mnol
