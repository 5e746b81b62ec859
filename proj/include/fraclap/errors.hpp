#pragma once

#include <stdexcept>
#include <string>

namespace fraclap {

/// Argument outside the mathematical domain of an operation (alpha outside
/// (0,2), t <= 0, a pole of Gamma, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A documented precondition was not met by the caller (mismatched grids,
/// misaligned quadratic panels, too few rows for a fit, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The numerics failed: a series or an iteration did not converge, or a
/// linear system lost diagonal dominance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fraclap
