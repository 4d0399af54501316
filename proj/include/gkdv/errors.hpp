#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gkdv {

/// Invalid grid, step size, or experiment configuration.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite input or a computation that overflowed.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Zero field (or zero mass/energy) where a normalized quantity was requested.
class DegenerateInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Argument outside the mathematical domain of a formula (p <= 1, alpha out of range, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input violates a documented precondition (asymmetric field, cost guard, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Mass too close to the periodic seam for x-weighted integrals to be meaningful.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, double t, double tail)
      : std::runtime_error(what), time_(t), tail_(tail) {}
  double time() const noexcept { return time_; }
  double tail_fraction() const noexcept { return tail_; }

 private:
  double time_;
  double tail_;
};

/// Iterative solver ran out of budget.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> residuals)
      : std::runtime_error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residual_history() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

}  // namespace gkdv
