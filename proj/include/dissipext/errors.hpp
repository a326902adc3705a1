#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace dissipext {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inadmissible user input (bad config, Im V < 0, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A function handed to an operator does not satisfy its boundary condition.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, double residual)
      : Error(what + " (residual " + format(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  static std::string format(double r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", r);
    return buf;
  }
  double residual_;
};

/// A quantity that is nonzero analytically came out numerically zero.
class NumericalBreakdown : public Error {
 public:
  using Error::Error;
};

class IntegrationFailure : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

}  // namespace dissipext
