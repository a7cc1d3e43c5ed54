#pragma once

#include <stdexcept>
#include <string>

namespace subchan {

/// Bad parameters or an input violating a documented invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// No feasible assignment / allocation exists for the given instance.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exhaustive method was asked to enumerate more candidates than its guard allows.
class GuardExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace subchan
