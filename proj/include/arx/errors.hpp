#pragma once

#include <stdexcept>
#include <string>

namespace arx {

/// Input rejected before any computation: bad dimensions, non-causal or
/// uncontrollable model, malformed config. CLI exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation that started but could not finish soundly: overflow guard
/// tripped, non-positive-definite limit matrix, degenerate rank-one update.
/// CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace arx
