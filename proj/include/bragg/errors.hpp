#pragma once

#include <stdexcept>
#include <string>

namespace bragg {

/// Invalid or missing configuration value (unknown keys, bad units, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated precondition on a physical or numerical parameter.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Propagation failed (integrator tolerance, step-size underflow, ...).
class PropagationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive split-step controller shrank the step below its floor.
class StiffnessError : public PropagationError {
 public:
  using PropagationError::PropagationError;
};

}  // namespace bragg
