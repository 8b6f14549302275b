#pragma once

#include <stdexcept>
#include <string>

namespace cvgme {

// Input outside the mathematical domain of an operation (non-finite r, lambda >= 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Caller violated an API contract (bad index, empty list, mismatched sizes).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A linear-algebra routine or solver failed to produce a trustworthy answer.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Matrix cannot be the covariance matrix of a physical state.
class InvalidCovarianceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Local projection kept (numerically) zero probability.
class DegenerateFilterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bisection endpoints do not bracket a sign change.
class BracketError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace cvgme
