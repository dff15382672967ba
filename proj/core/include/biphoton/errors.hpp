#pragma once

#include <stdexcept>
#include <string>

namespace biphoton {

// Bad user input or parameters outside an operation's preconditions.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Physical model evaluated outside its domain (e.g. Sellmeier validity range).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Numerical method failed to reach its tolerance. Carries the best estimate.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

}  // namespace biphoton
