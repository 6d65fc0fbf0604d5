#pragma once

#include <stdexcept>
#include <string>

namespace aldnls {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (pole, cut, |R| >= 1).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Ray v = n/t outside |v| <= 2 - V0.
class RegionError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature exceeded its depth cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A runtime numerical consistency check failed (conservation drift,
/// blow-up, residual imaginary part, |r| >= 1).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed or invalid run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace aldnls
