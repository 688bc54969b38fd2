#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "propsim/fading.hpp"
#include "propsim/geometry.hpp"
#include "propsim/numeric.hpp"
#include "propsim/path_loss.hpp"

namespace propsim {

class RestrictedSimulator;

// Total-variation bounds between N restricted to (0, tau] and the Poisson
// process with the same mean measure.
struct TVBoundReport {
  enum class Side { propagation, power };

  double tau = 0.0;
  double sum_p = 0.0;     // M(tau)
  double sum_p_sq = 0.0;  // sum of p_i(tau)^2
  double upper = 0.0;     // min(1, sum_p_sq)
  double upper_unclipped = 0.0;
  double lower = 0.0;  // (1 ^ 1/M) / 32 * sum_p_sq
  double max_p = 0.0;
  double mean_times_max_p = 0.0;  // M(tau) sup p_i(tau)
  std::size_t n_points = 0;       // points entering the sums (0 when integrated)
  // Which process the bounds are stated for: N on (0, tau] or the power
  // process on [power_floor, inf) with power_floor = 1 / tau.
  Side side = Side::propagation;
  double power_floor = 0.0;
};

const char* to_string(TVBoundReport::Side side) noexcept;

TVBoundReport tv_bounds_from_probabilities(std::span<const double> p, double tau);

enum class Window {
  truncated,  // the pattern is a window of a larger transmitter set
  complete,   // the pattern is every transmitter
};

// Bounds for a finite pattern. With Window::truncated, throws
// TruncationRiskError if a point at r_max would reach (0, tau] with
// probability above 1e-12.
TVBoundReport tv_bounds(const PointPattern2D& pattern, const PathLoss& path_loss,
                        const Fading& fading, double tau, Window window = Window::truncated);

// Bounds for the infinite transmitter set of a simulator's deterministic
// source (finite pattern or lattice), far field included.
TVBoundReport tv_bounds(const RestrictedSimulator& simulator);

// The same numbers relabeled for the power process on [1/tau, inf) (or back).
// Applying it twice restores the original. tau must be positive and finite.
TVBoundReport power_side_bounds(const TVBoundReport& report);

using PatternSampler = std::function<PointPattern2D(std::uint64_t seed)>;

// Monte-Carlo estimate of E sum_{x in Xi} p_x(tau)^2 over realizations
// sampler(derive_seed(seed, i)).
Estimate cox_bound(const PatternSampler& sampler, const PathLoss& path_loss, const Fading& fading,
                   double tau, std::size_t n_reps, std::uint64_t seed);

double cox_bound_from_probabilities(std::span<const double> p);

struct VarianceRatioPoint {
  double r = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double ratio = 0.0;  // variance / mean^2
  double std_error = 0.0;
};

// Var(|Xi|(r)) / E(|Xi|(r))^2 on a grid of radii, with jackknife standard
// errors over n_reps realizations.
std::vector<VarianceRatioPoint> variance_ratio(const PatternSampler& sampler,
                                               std::span<const double> r_grid, std::size_t n_reps,
                                               std::uint64_t seed);

}  // namespace propsim
