#pragma once

#include <stdexcept>
#include <string>

namespace loopsoup {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// A quantity that is infinite for the requested parameters (e.g. 𝛒'(0) for d = 3, 4).
struct DivergenceError : std::domain_error {
  using std::domain_error::domain_error;
};

// Argument outside the range where a truncated inverse exists.
struct RangeError : std::range_error {
  using std::range_error::range_error;
};

struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CombinatorialBlowup : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace loopsoup
