#pragma once

#include <stdexcept>
#include <string>

namespace propsim {

// Base of every error thrown by the library. The CLI maps ConfigError to
// exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A constructor or operation received a parameter outside its domain
// (non-positive edge length, negative intensity, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A function was evaluated outside the set where it is defined
// (h(r) for r <= 0, Lambert W of a negative number, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Radial count requested beyond the simulated disk.
class OutOfWindowError : public Error {
 public:
  OutOfWindowError(double r, double r_max);

  double radius() const noexcept { return radius_; }
  double r_max() const noexcept { return r_max_; }

 private:
  double radius_;
  double r_max_;
};

// Points outside the simulated disk could contribute non-negligibly.
// Carries a disk radius that would satisfy the guard.
class TruncationRiskError : public Error {
 public:
  TruncationRiskError(const std::string& what, double suggested_r_max);

  double suggested_r_max() const noexcept { return suggested_r_max_; }

 private:
  double suggested_r_max_;
};

// A statistic or measure is undefined for the supplied data
// (zero mean, M(tau) = 0, ...).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Floating point overflow while evaluating a finite quantity.
class NumericError : public Error {
 public:
  using Error::Error;
};

// The requested combination of models has no implementation
// (e.g. conditional sampling of an i.i.d. product of two random factors).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Malformed experiment configuration. `field` is a dotted path.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message);

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace propsim
