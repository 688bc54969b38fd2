#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

namespace propsim {

// A Monte-Carlo or numerical estimate. std_error is zero for deterministic
// evaluations (closed forms, quadrature).
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Upper tail of the standard normal, P(B >= x).
double normal_sf(double x);

// Inverse of normal_sf on (0, 1).
double normal_isf(double q);

using Integrand = std::function<double(double)>;

// Adaptive Gauss-Kronrod integral of f over [a, b] (finite). Relative
// tolerance applies to the L1 norm of the integrand.
double integrate(const Integrand& f, double a, double b, double rel_tol = 1e-12);

// Same as integrate(), splitting [a, b] at the given interior points first.
// Breakpoints outside (a, b) are ignored; order does not matter.
double integrate_piecewise(const Integrand& f, double a, double b,
                           std::span<const double> breakpoints, double rel_tol = 1e-12);

// Integral of f over [a, inf) for f decaying to zero, summed over blocks of
// growing width until a block adds less than abs_tol.
double integrate_to_infinity(const Integrand& f, double a, double abs_tol = 1e-14);

// Poisson(mean) probability mass at k.
double poisson_pmf(std::int64_t k, double mean);

// Welford accumulator for mean and unbiased variance.
class RunningStats {
 public:
  void push(double x) noexcept;
  void merge(const RunningStats& other) noexcept;

  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept;  // denominator n - 1
  double std_error() const noexcept;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace propsim
