#pragma once

#include <stdexcept>
#include <string>

namespace tubelab {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Mismatched or unsupported sizes (matrix dimensions, spectrum length, n > 8 ...).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative method exhausted its iteration or term budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested work exceeds a configured cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Transport problem whose marginals carry different total mass.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Weights that cannot be represented on the requested step resolution.
class ResolutionError : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace tubelab
