#pragma once

#include <stdexcept>
#include <string>

namespace memfun {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A constructor or operation received a parameter outside its domain.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature exhausted its refinement budget.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// The functional is only defined for regular kernels.
class UnsupportedKernelClass : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent configuration (JSON or CSV input).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace memfun
