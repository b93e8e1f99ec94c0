#pragma once

#include <stdexcept>
#include <string>

namespace ranslice {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative kernel ran out of budget. Carries the last partial value.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double partial)
      : std::runtime_error(what), partial_(partial) {}
  double partial_value() const noexcept { return partial_; }

 private:
  double partial_;
};

/// Dual ascent made no progress for `patience` consecutive steps.
class StallError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inner solver hit a non-finite gradient for one tenant.
class NonFiniteGradientError : public std::runtime_error {
 public:
  NonFiniteGradientError(const std::string& what, long tenant)
      : std::runtime_error(what), tenant_(tenant) {}
  long tenant() const noexcept { return tenant_; }

 private:
  long tenant_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ranslice
