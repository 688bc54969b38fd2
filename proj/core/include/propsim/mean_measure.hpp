#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "propsim/fading.hpp"
#include "propsim/geometry.hpp"
#include "propsim/numeric.hpp"
#include "propsim/path_loss.hpp"

namespace propsim {

// t -> M(t), nondecreasing on (0, inf).
class MeanMeasure {
 public:
  enum class Kind { exact_sum, closed_form, monte_carlo, tabulated };

  MeanMeasure(Kind kind, std::function<double(double)> evaluator);

  // Evaluates f on n log-spaced points of [t_lo, t_hi] and interpolates
  // linearly in log-log coordinates. Beyond t_hi f itself is called; below
  // t_lo the first segment's power law is extended.
  static MeanMeasure tabulate(std::function<double(double)> f, double t_lo, double t_hi,
                              std::size_t n);

  double operator()(double t) const;
  Kind kind() const noexcept { return kind_; }
  std::string kind_name() const;

 private:
  struct Table;

  Kind kind_;
  std::function<double(double)> eval_;
  std::shared_ptr<const Table> table_;
};

// Sum of p_i(t) over the pattern.
double exact_sum(const PointPattern2D& pattern, const PathLoss& path_loss, const Fading& fading,
                 double t);

// M^Xi(t) for a realized random pattern; the directing measure of the Cox
// target at t.
double conditional_mean(const PointPattern2D& realization, const PathLoss& path_loss,
                        const Fading& fading, double t);

// lambda pi t^(2/beta) E S^(2/beta) / K^2 for power-law gain (K r)^beta and
// Poisson transmitters of intensity lambda.
double closed_form_power_law(double lambda, double K, double beta, const Fading& fading, double t);

struct LambertOptions {
  // 0 selects quadrature; otherwise a Monte-Carlo estimate with this many
  // fading draws.
  std::size_t mc_samples = 0;
  std::uint64_t seed = 0;
};

// pi lambda E[(tS)^(2/beta) exp(-2 W((alpha/beta) (tS)^(1/beta)))] for gain
// r^beta e^(alpha r).
Estimate closed_form_lambert(double lambda, double alpha, double beta, const Fading& fading,
                             double t, const LambertOptions& options = {});

// lambda pi sum_i c_i^2 t^(2/beta_i) E[1{s_(i-1) <= tS < s_i} S^(2/beta_i)]
// for a multi-slope gain, i.e. lambda pi E[h^-1(tS)^2].
double multislope_mean(double lambda, const PathLoss& multi_slope, const Fading& fading, double t);

// The same sum with the alternative constants 2 pi lambda, c_i in place of
// c_i^2, and the last segment left out. Reported for comparison only.
double multislope_mean_alternative(double lambda, const PathLoss& multi_slope, const Fading& fading,
                                   double t);

// Expected number of transmitters with r_lo < |x| <= r_hi that reach (0, t]
// when the transmitters have mean count D(r): E[D(clamp(h^-1(tS))) - D(r_lo)].
double intensity_mean(const GrowthFunction& growth, const PathLoss& path_loss, const Fading& fading,
                      double t, double r_lo = 0.0,
                      double r_hi = std::numeric_limits<double>::infinity());

// Average of |xi|(h^-1(S_j t)) over n_samples marginal fading draws. Throws
// TruncationRiskError when P(h^-1(St) > r_max) > 1e-6.
Estimate monte_carlo_mean(const PointPattern2D& pattern, const PathLoss& path_loss,
                          const Fading& fading, double t, std::size_t n_samples,
                          std::uint64_t seed);

// Average of D(h^-1(S_j t)).
Estimate monte_carlo_mean(const GrowthFunction& growth, const PathLoss& path_loss,
                          const Fading& fading, double t, std::size_t n_samples,
                          std::uint64_t seed);

}  // namespace propsim
