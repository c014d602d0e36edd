#pragma once

#include <stdexcept>
#include <string>

namespace lagpath {

// Bad configuration or out-of-domain arguments supplied by a caller.
class config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// NaN/Inf, collisions, singular matrices during a computation.
class numerical_failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Kernel or jet evaluated at a zero displacement.
class singular_evaluation : public numerical_failure {
 public:
  using numerical_failure::numerical_failure;
};

}  // namespace lagpath
