#pragma once

#include <stdexcept>
#include <string>

namespace fishpath {

/// Bad input: a parameter, config key or precondition the caller can fix.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that left the finite / well-posed regime (divergence,
/// singular denominators, lost positivity).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message);

}  // namespace fishpath
