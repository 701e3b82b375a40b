#pragma once

#include <stdexcept>
#include <string>

namespace isobandit {

// Invalid kernel/algorithm parameters or malformed configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Cholesky breakdown that survived jitter escalation.
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Local polynomial constraint matrix lost rank (points lie on an algebraic
// surface of degree <= q, or there are too few of them).
class UnisolvencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace isobandit
