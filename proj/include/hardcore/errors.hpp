#pragma once

#include <stdexcept>
#include <string>

namespace hardcore {

// Caller passed something outside an operation's domain.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A recursion denominator vanished structurally.
class SingularModel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A self-check of a solver failed. This indicates a bug, not model behaviour.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hardcore
