#include "propsim/poisson_approx.hpp"

#include <algorithm>
#include <cmath>

#include "propsim/error.hpp"
#include "propsim/parallel.hpp"
#include "propsim/propagation.hpp"
#include "propsim/random.hpp"
#include "propsim/simulate.hpp"

namespace propsim {

namespace {

void finish(TVBoundReport& r) {
  r.upper_unclipped = r.sum_p_sq;
  r.upper = std::min(1.0, r.sum_p_sq);
  const double factor = r.sum_p > 1.0 ? 1.0 / r.sum_p : 1.0;
  r.lower = factor / 32.0 * r.sum_p_sq;
  r.mean_times_max_p = r.sum_p * r.max_p;
  r.power_floor = 1.0 / r.tau;
}

void check_window(const PointPattern2D& pattern, const PathLoss& path_loss, const Fading& fading,
                  double tau) {
  if (pattern.r_max() > 0.0 && point_probability(path_loss, fading, pattern.r_max(), tau) > 1e-12) {
    throw TruncationRiskError("points beyond r_max could reach (0, tau] with probability above 1e-12",
                              suggest_r_max(path_loss, fading, tau, 1e-12));
  }
}

}  // namespace

const char* to_string(TVBoundReport::Side side) noexcept {
  return side == TVBoundReport::Side::power ? "power" : "propagation";
}

TVBoundReport tv_bounds_from_probabilities(std::span<const double> p, double tau) {
  if (!(tau > 0.0)) throw ParameterError("tau must be positive");
  TVBoundReport r;
  r.tau = tau;
  for (double x : p) {
    if (!(x >= 0.0 && x <= 1.0)) throw ParameterError("probabilities must lie in [0, 1]");
    r.sum_p += x;
    r.sum_p_sq += x * x;
    r.max_p = std::max(r.max_p, x);
  }
  r.n_points = p.size();
  finish(r);
  return r;
}

TVBoundReport tv_bounds(const PointPattern2D& pattern, const PathLoss& path_loss,
                        const Fading& fading, double tau, Window window) {
  if (!(tau > 0.0)) throw ParameterError("tau must be positive");
  if (window == Window::truncated) check_window(pattern, path_loss, fading, tau);
  std::vector<double> p;
  p.reserve(pattern.size());
  for (double r : pattern.radii()) p.push_back(point_probability(path_loss, fading, r, tau));
  return tv_bounds_from_probabilities(p, tau);
}

TVBoundReport tv_bounds(const RestrictedSimulator& simulator) {
  if (source_is_random(simulator.source())) {
    throw ParameterError("TV bounds need a deterministic transmitter set; use cox_bound");
  }
  TVBoundReport r;
  r.tau = simulator.tau();
  r.sum_p = simulator.mean_measure(r.tau);
  r.sum_p_sq = simulator.sum_p_squared(r.tau);
  r.max_p = simulator.max_p(r.tau);
  if (const auto* f = std::get_if<FiniteSource>(&simulator.source())) r.n_points = f->pattern.size();
  finish(r);
  return r;
}

TVBoundReport power_side_bounds(const TVBoundReport& report) {
  if (!(report.tau > 0.0) || std::isinf(report.tau)) {
    throw ParameterError("power-side bounds need a positive finite threshold");
  }
  TVBoundReport out = report;
  out.side = report.side == TVBoundReport::Side::propagation ? TVBoundReport::Side::power
                                                             : TVBoundReport::Side::propagation;
  out.power_floor = 1.0 / report.tau;
  return out;
}

double cox_bound_from_probabilities(std::span<const double> p) {
  double total = 0.0;
  for (double x : p) total += x * x;
  return total;
}

Estimate cox_bound(const PatternSampler& sampler, const PathLoss& path_loss, const Fading& fading,
                   double tau, std::size_t n_reps, std::uint64_t seed) {
  if (n_reps < 100) throw ParameterError("cox_bound needs n_reps >= 100");
  if (!(tau > 0.0)) throw ParameterError("tau must be positive");
  const auto sums = parallel_map<double>(n_reps, [&](std::size_t i) {
    const PointPattern2D pattern = sampler(derive_seed(seed, i));
    check_window(pattern, path_loss, fading, tau);
    double total = 0.0;
    for (double r : pattern.radii()) {
      const double p = point_probability(path_loss, fading, r, tau);
      if (p == 0.0) break;
      total += p * p;
    }
    return total;
  });
  RunningStats stats;
  for (double s : sums) stats.push(s);
  return {stats.mean(), stats.std_error()};
}

std::vector<VarianceRatioPoint> variance_ratio(const PatternSampler& sampler,
                                               std::span<const double> r_grid, std::size_t n_reps,
                                               std::uint64_t seed) {
  if (n_reps < 1000) throw ParameterError("variance_ratio needs n_reps >= 1000");
  const std::size_t m = r_grid.size();
  const auto counts = parallel_map<std::vector<double>>(n_reps, [&](std::size_t i) {
    const PointPattern2D pattern = sampler(derive_seed(seed, i));
    std::vector<double> row(m);
    for (std::size_t j = 0; j < m; ++j) row[j] = static_cast<double>(pattern.radial_count(r_grid[j]));
    return row;
  });

  std::vector<VarianceRatioPoint> out;
  const auto n = static_cast<double>(n_reps);
  for (std::size_t j = 0; j < m; ++j) {
    double s1 = 0.0;
    for (const auto& row : counts) s1 += row[j];
    const double mean = s1 / n;
    // Centered sums keep the leave-one-out updates free of cancellation.
    double c2 = 0.0;
    for (const auto& row : counts) c2 += (row[j] - mean) * (row[j] - mean);
    VarianceRatioPoint pt;
    pt.r = r_grid[j];
    pt.mean = mean;
    pt.variance = c2 / (n - 1.0);
    pt.ratio = mean > 0.0 ? pt.variance / (mean * mean) : 0.0;

    std::vector<double> loo(n_reps);
    double loo_mean = 0.0;
    for (std::size_t i = 0; i < n_reps; ++i) {
      const double d = counts[i][j] - mean;
      const double m_i = mean - d / (n - 1.0);
      const double c2_i = c2 - d * d * n / (n - 1.0);
      const double v_i = c2_i / (n - 2.0);
      loo[i] = m_i > 0.0 ? v_i / (m_i * m_i) : 0.0;
      loo_mean += loo[i];
    }
    loo_mean /= n;
    double acc = 0.0;
    for (double x : loo) acc += (x - loo_mean) * (x - loo_mean);
    pt.std_error = std::sqrt((n - 1.0) / n * acc);
    out.push_back(pt);
  }
  return out;
}

}  // namespace propsim
