#pragma once

#include <stdexcept>
#include <string>

namespace doubling {

/// Raised when an input violates a documented precondition or invariant.
/// The CLI maps it to exit status 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a computation produces a non-finite value.  The CLI maps it
/// to exit status 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace doubling
