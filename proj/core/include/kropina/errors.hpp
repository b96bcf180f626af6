#pragma once

#include <stdexcept>
#include <string>

namespace kropina {

// Base for every library error; callers that want a single catch use this.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input could not be parsed (expression grammar, scenario JSON).
struct ParseError : Error {
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at offset " + std::to_string(position) + ")"),
        offset(position) {}
  std::size_t offset;
};

// Evaluation left the admissible domain: L <= 0, beta at the cone edge,
// vanishing conformal denominators, rho = 0.
struct DomainError : Error {
  using Error::Error;
};

// A dense inversion hit a determinant below the guard threshold.
struct SingularMatrix : DomainError {
  SingularMatrix(const std::string& what, double det)
      : DomainError(what + " (det ~ " + std::to_string(det) + ")"),
        det_estimate(det) {}
  double det_estimate;
};

// Scenario-level misuse: unknown check name, malformed point list, sampler
// rejection rate too high, dimension out of range.
struct ScenarioError : Error {
  using Error::Error;
};

}  // namespace kropina
