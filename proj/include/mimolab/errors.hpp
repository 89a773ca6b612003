// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace mimolab {

// Model parameter outside its admissible range (nonpositive beta, r > 1, ...).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input broke a structural precondition (non-Hermitian, not PSD).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Hermitian positive-definite factorization broke down.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scenario has no interfering user or a zero combiner where one is required.
class DegenerateScenario : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace mimolab
