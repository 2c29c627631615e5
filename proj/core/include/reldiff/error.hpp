#pragma once

#include <stdexcept>
#include <string>

namespace reldiff {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: parameters outside their admissible range, inconsistent
/// configuration, violated preconditions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not deliver the requested accuracy
/// (non-convergent quadrature, unresolved grid, aliasing).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Evaluation of a spectral density exactly at its singular point.
class SingularityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

namespace detail {
[[noreturn]] inline void fail_validation(const std::string& msg) { throw ValidationError(msg); }
}  // namespace detail

}  // namespace reldiff
