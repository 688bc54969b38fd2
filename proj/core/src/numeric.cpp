#include "propsim/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "propsim/error.hpp"

namespace propsim {

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_isf(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    if (q == 0.0) return std::numeric_limits<double>::infinity();
    if (q == 1.0) return -std::numeric_limits<double>::infinity();
    throw DomainError("normal_isf: probability must lie in [0, 1]");
  }
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
}

double integrate(const Integrand& f, double a, double b, double rel_tol) {
  if (!(b > a)) return 0.0;
  double error = 0.0;
  double l1 = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, rel_tol,
                                                                       &error, &l1);
}

double integrate_piecewise(const Integrand& f, double a, double b,
                           std::span<const double> breakpoints, double rel_tol) {
  if (!(b > a)) return 0.0;
  std::vector<double> cuts{a};
  for (double x : breakpoints) {
    if (x > a && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += integrate(f, cuts[i], cuts[i + 1], rel_tol);
  }
  return total;
}

double integrate_to_infinity(const Integrand& f, double a, double abs_tol) {
  double total = 0.0;
  double lo = a;
  double width = std::max(1.0, std::abs(a));
  int quiet_blocks = 0;
  for (int block = 0; block < 200; ++block) {
    const double hi = lo + width;
    const double part = integrate(f, lo, hi);
    total += part;
    // Two consecutive negligible blocks end the sum: a single small block can
    // sit in front of the bulk when `a` is far to the left of it.
    quiet_blocks = std::abs(part) <= abs_tol + 1e-15 * std::abs(total) ? quiet_blocks + 1 : 0;
    if (quiet_blocks >= 2) return total;
    lo = hi;
    width *= 2.0;
    if (!std::isfinite(lo)) break;
  }
  return total;
}

double poisson_pmf(std::int64_t k, double mean) {
  if (k < 0) return 0.0;
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  const double kk = static_cast<double>(k);
  return std::exp(kk * std::log(mean) - mean - std::lgamma(kk + 1.0));
}

void RunningStats::push(double x) noexcept {
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

void RunningStats::merge(const RunningStats& other) noexcept {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double d = other.mean_ - mean_;
  const double n = na + nb;
  mean_ += d * nb / n;
  m2_ += other.m2_ + d * d * na * nb / n;
  n_ += other.n_;
}

double RunningStats::variance() const noexcept {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double RunningStats::std_error() const noexcept {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

}  // namespace propsim
