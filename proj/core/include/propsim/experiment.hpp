#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "propsim/config.hpp"
#include "propsim/geometry.hpp"
#include "propsim/simulate.hpp"

namespace propsim {

const char* version() noexcept;

// sample, mean-measure, tv-bound, converge, diagnose, ginibre-check, cox-compare
const std::vector<std::string>& subcommand_names();

// Area of W intersected with W + v for the disk W of the given radius, |v| = v.
double disk_set_covariance(double radius, double v);

struct PairCorrelationPoint {
  double u = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  // 1 - exp(-c v^2 / alpha) averaged over the ring with the estimator's
  // weights, i.e. the estimator's expectation.
  double target = 0.0;
};

// Ring estimator of the alpha-Ginibre pair correlation at each u, using
// ordered pairs at distance in [u - half_width, u + half_width] within the
// disk of radius window_radius and the known intensity c / pi. Realization i
// uses derive_seed(seed, i).
std::vector<PairCorrelationPoint> ginibre_pair_correlation(const GinibreParams& params,
                                                           double window_radius,
                                                           std::span<const double> u,
                                                           double half_width, std::size_t n_reps,
                                                           std::uint64_t seed);

// The radial source a configuration describes, for one fading law.
RadialSource make_source(const ExperimentConfig& config);

// Runs one subcommand and returns the paths written (sidecars excluded).
std::vector<std::string> run_experiment(const std::string& subcommand,
                                        const ExperimentConfig& config);

// Loads the configuration, runs the subcommand and maps errors to exit codes:
// 0 success, 1 runtime or numeric error, 2 configuration error.
int run_cli(const std::string& subcommand, const std::string& config_path,
            const Overrides& overrides, std::ostream& out, std::ostream& err);

}  // namespace propsim
