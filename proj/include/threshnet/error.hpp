#pragma once

#include <stdexcept>
#include <string>

namespace threshnet {

// Bad command line or config; CLI exit code 1.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Argument outside an operation's domain (p outside (0,1), vertex out of range, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// A work or memory cap would be exceeded.
struct CapacityError : std::length_error {
  using std::length_error::length_error;
};

// Quadrature failure, non-finite integrand, and similar.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The requested limit does not exist for this configuration (e.g. C(x) diverges).
struct RegimeError : NumericError {
  using NumericError::NumericError;
};

// Conditioning on an event of probability zero.
struct DegenerateConditioningError : NumericError {
  using NumericError::NumericError;
};

}  // namespace threshnet
