#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "propsim/mean_measure.hpp"
#include "propsim/propagation.hpp"

namespace propsim {

// Maps each point t of a tau-restricted process to M(t) / M(tau).
std::vector<double> time_rescale(const PropagationProcess& process, const MeanMeasure& measure);

struct KSResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

// Two-sided one-sample Kolmogorov-Smirnov test against Uniform(0, 1).
// p-values use the exact finite-n distribution below 35 points and the
// limiting Kolmogorov distribution from 35 on.
KSResult ks_uniform(std::span<const double> points);

// P(sqrt(n) D_n > x) in the limit, i.e. the Kolmogorov survival function.
double kolmogorov_sf(double x);
// Exact P(D_n < d) for a sample of size n.
double ks_exact_cdf(std::size_t n, double d);

struct DispersionResult {
  double index = 0.0;  // sample variance / sample mean
  double mean = 0.0;
  double variance = 0.0;
  // Chi-square confidence interval for the true variance-to-mean ratio.
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  std::size_t n = 0;
};

DispersionResult dispersion(std::span<const std::int64_t> counts, double level = 0.01);

// Half the L1 distance between the empirical pmf of the counts and
// Poisson(mean), tail included.
double count_fit(std::span<const std::int64_t> counts, double mean);

// Quantile of count_fit over n_sims batches of n_reps Poisson(mean) counts.
double count_tv_null_quantile(std::size_t n_reps, double mean, double quantile, std::size_t n_sims,
                              std::uint64_t seed);

enum class Verdict { poisson_consistent, overdispersed, underdispersed, mean_mismatch };

const char* to_string(Verdict verdict) noexcept;

struct GoFOptions {
  // Family-wise level; each of the three statistics is tested at level / 3.
  double level = 0.01;
  std::size_t null_sims = 1000;
  std::uint64_t null_seed = 0x6f0d1a7b3c5e9f21ULL;
  // Skips the null simulation when set.
  std::optional<double> count_tv_threshold;
};

struct GoFReport {
  std::size_t n_reps = 0;
  double tau = 0.0;
  double expected_count = 0.0;  // M(tau)
  double mean_count = 0.0;
  double mean_count_se = 0.0;
  double dispersion_index = 0.0;
  double dispersion_ci_lower = 0.0;
  double dispersion_ci_upper = 0.0;
  std::size_t n_points = 0;
  double ks_statistic = 0.0;
  double ks_p_value = 1.0;
  double count_tv = 0.0;
  double count_tv_threshold = 0.0;
  Verdict verdict = Verdict::poisson_consistent;
};

// Counts of N(tau) per replication, pooled time-rescaled points, and the
// three tests combined by Bonferroni:
//   overdispersed / underdispersed when the dispersion interval excludes 1,
//   mean_mismatch when the KS test or the count-law distance rejects,
//   poisson_consistent otherwise.
GoFReport goodness_of_fit(std::span<const PropagationProcess> replications,
                          const MeanMeasure& measure, double tau, const GoFOptions& options = {});

}  // namespace propsim
