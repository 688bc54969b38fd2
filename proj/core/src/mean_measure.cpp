#include "propsim/mean_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "propsim/error.hpp"
#include "propsim/parallel.hpp"
#include "propsim/propagation.hpp"
#include "propsim/random.hpp"

namespace propsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;
constexpr std::size_t kChunk = 4096;

// Parallel Monte-Carlo mean of draw(rng) over n samples, chunked with derived
// seeds and merged in chunk order.
Estimate chunked_mean(std::size_t n, std::uint64_t seed,
                      const std::function<double(Rng&)>& draw) {
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  auto parts = parallel_map<RunningStats>(chunks, [&](std::size_t c) {
    Rng rng = make_rng(derive_seed(seed, c));
    RunningStats stats;
    const std::size_t m = std::min(kChunk, n - c * kChunk);
    for (std::size_t i = 0; i < m; ++i) stats.push(draw(rng));
    return stats;
  });
  RunningStats total;
  for (const auto& part : parts) total.merge(part);
  return {total.mean(), total.std_error()};
}

}  // namespace

struct MeanMeasure::Table {
  std::vector<double> log_t;
  std::vector<double> t;
  std::vector<double> m;
  std::function<double(double)> f;
};

MeanMeasure::MeanMeasure(Kind kind, std::function<double(double)> evaluator)
    : kind_(kind), eval_(std::move(evaluator)) {
  if (!eval_) throw ParameterError("mean measure needs an evaluator");
}

MeanMeasure MeanMeasure::tabulate(std::function<double(double)> f, double t_lo, double t_hi,
                                  std::size_t n) {
  if (!(t_lo > 0.0) || !(t_hi > t_lo) || n < 2) {
    throw ParameterError("tabulation needs 0 < t_lo < t_hi and at least two points");
  }
  auto table = std::make_shared<Table>();
  const double a = std::log(t_lo);
  const double b = std::log(t_hi);
  for (std::size_t i = 0; i < n; ++i) {
    const double lt = i + 1 == n ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    table->log_t.push_back(lt);
    table->t.push_back(i + 1 == n ? t_hi : (i == 0 ? t_lo : std::exp(lt)));
  }
  table->m = parallel_map<double>(n, [&](std::size_t i) { return f(table->t[i]); });
  for (std::size_t i = 1; i < n; ++i) table->m[i] = std::max(table->m[i], table->m[i - 1]);
  table->f = std::move(f);

  MeanMeasure out(Kind::tabulated, [](double) { return 0.0; });
  out.table_ = table;
  out.eval_ = [table](double t) {
    const auto& tb = *table;
    if (!(t > 0.0)) return 0.0;
    if (t == tb.t.back()) return tb.m.back();
    if (t > tb.t.back()) return std::max(tb.m.back(), tb.f(t));
    const double lt = std::log(t);
    if (t <= tb.t.front()) {
      if (!(tb.m[0] > 0.0) || !(tb.m[1] > 0.0)) return t == tb.t.front() ? tb.m[0] : 0.0;
      const double slope = (std::log(tb.m[1]) - std::log(tb.m[0])) / (tb.log_t[1] - tb.log_t[0]);
      return tb.m[0] * std::exp(slope * (lt - tb.log_t[0]));
    }
    const auto hi = static_cast<std::size_t>(
        std::upper_bound(tb.t.begin(), tb.t.end(), t) - tb.t.begin());
    const std::size_t lo = hi - 1;
    const double w = (lt - tb.log_t[lo]) / (tb.log_t[hi] - tb.log_t[lo]);
    if (tb.m[lo] > 0.0 && tb.m[hi] > 0.0) {
      return std::exp(std::log(tb.m[lo]) + w * (std::log(tb.m[hi]) - std::log(tb.m[lo])));
    }
    return tb.m[lo] + w * (tb.m[hi] - tb.m[lo]);
  };
  return out;
}

double MeanMeasure::operator()(double t) const { return eval_(t); }

std::string MeanMeasure::kind_name() const {
  switch (kind_) {
    case Kind::exact_sum:
      return "exact_sum";
    case Kind::closed_form:
      return "closed_form";
    case Kind::monte_carlo:
      return "monte_carlo";
    case Kind::tabulated:
      return "tabulated";
  }
  return "unknown";
}

double exact_sum(const PointPattern2D& pattern, const PathLoss& path_loss, const Fading& fading,
                 double t) {
  if (!(t > 0.0)) return 0.0;
  double total = 0.0;
  for (double r : pattern.radii()) total += point_probability(path_loss, fading, r, t);
  return total;
}

double conditional_mean(const PointPattern2D& realization, const PathLoss& path_loss,
                        const Fading& fading, double t) {
  return exact_sum(realization, path_loss, fading, t);
}

double closed_form_power_law(double lambda, double K, double beta, const Fading& fading, double t) {
  if (!(lambda > 0.0) || !(K > 0.0) || !(beta > 0.0)) {
    throw ParameterError("lambda, K and beta must be positive");
  }
  if (!(t > 0.0)) return 0.0;
  const double moment = fading.fractional_moment(2.0 / beta);
  if (std::isinf(moment)) {
    throw DomainError("E S^(2/beta) is infinite: the propagation process has no Poisson limit");
  }
  return lambda * kPi * std::pow(t, 2.0 / beta) * moment / (K * K);
}

Estimate closed_form_lambert(double lambda, double alpha, double beta, const Fading& fading,
                             double t, const LambertOptions& options) {
  if (!(lambda > 0.0) || !(alpha >= 0.0) || !(beta > 0.0)) {
    throw ParameterError("lambda and beta must be positive, alpha non-negative");
  }
  if (!(t > 0.0)) return {0.0, 0.0};
  auto term = [&](double s) {
    const double y = t * s;
    const double w = lambert_w(alpha / beta * std::pow(y, 1.0 / beta));
    return kPi * lambda * std::pow(y, 2.0 / beta) * std::exp(-2.0 * w);
  };
  if (options.mc_samples == 0) return {fading.expect(term), 0.0};
  if (options.mc_samples < 100) throw ParameterError("Monte-Carlo estimates need >= 100 samples");
  return chunked_mean(options.mc_samples, options.seed,
                      [&](Rng& rng) { return term(fading.sample(rng)); });
}

namespace {

// Segment sums sum_i weight(c_i) t^(2/beta_i) E[1{s_(i-1) <= tS < s_i} S^(2/beta_i)]
// over segments [first, last).
double multislope_sum(const MultiSlope& m, const Fading& fading, double t, std::size_t last,
                      bool squared) {
  double total = 0.0;
  const std::size_t k = m.thresholds.size();
  for (std::size_t i = 0; i < last; ++i) {
    const double p = 2.0 / m.exponents[i];
    const double c = squared ? m.inverse_scale[i] * m.inverse_scale[i] : m.inverse_scale[i];
    const double lo = i == 0 ? 0.0 : m.thresholds[i - 1] / t;
    const double hi = i == k ? kInf : m.thresholds[i] / t;
    double truncated = 0.0;
    if (k == 0) {
      truncated = fading.fractional_moment(p);
    } else {
      std::vector<double> kinks;
      if (lo > 0.0) kinks.push_back(lo);
      if (std::isfinite(hi)) kinks.push_back(hi);
      truncated = fading.expect(
          [&](double s) { return (s >= lo && s < hi) ? std::pow(s, p) : 0.0; }, kinks);
    }
    total += c * std::pow(t, p) * truncated;
  }
  return total;
}

const MultiSlope& require_multislope(const PathLoss& pl) {
  const MultiSlope* m = pl.as_multi_slope();
  if (!m) throw ParameterError("multi-slope mean needs a multi-slope path loss");
  return *m;
}

}  // namespace

double multislope_mean(double lambda, const PathLoss& multi_slope, const Fading& fading, double t) {
  if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
  const MultiSlope& m = require_multislope(multi_slope);
  if (!(t > 0.0)) return 0.0;
  return lambda * kPi * multislope_sum(m, fading, t, m.segments(), true);
}

double multislope_mean_alternative(double lambda, const PathLoss& multi_slope, const Fading& fading,
                                   double t) {
  if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
  const MultiSlope& m = require_multislope(multi_slope);
  if (!(t > 0.0)) return 0.0;
  return 2.0 * kPi * lambda * multislope_sum(m, fading, t, m.thresholds.size(), false);
}

double intensity_mean(const GrowthFunction& growth, const PathLoss& path_loss, const Fading& fading,
                      double t, double r_lo, double r_hi) {
  if (!(r_lo >= 0.0) || !(r_hi > r_lo)) throw ParameterError("need 0 <= r_lo < r_hi");
  if (!(t > 0.0)) return 0.0;
  std::vector<double> kinks;
  if (r_lo > 0.0) kinks.push_back(path_loss.evaluate(r_lo) / t);
  if (std::isfinite(r_hi)) kinks.push_back(path_loss.evaluate(r_hi) / t);
  const double base = growth(r_lo);
  return fading.expect(
      [&](double s) {
        const double rho = std::min(path_loss.inverse(t * s), r_hi);
        if (rho <= r_lo) return 0.0;
        if (std::isinf(rho)) return kInf;
        return growth(rho) - base;
      },
      kinks);
}

Estimate monte_carlo_mean(const PointPattern2D& pattern, const PathLoss& path_loss,
                          const Fading& fading, double t, std::size_t n_samples,
                          std::uint64_t seed) {
  if (n_samples < 100) throw ParameterError("Monte-Carlo estimates need >= 100 samples");
  if (!(t > 0.0)) return {0.0, 0.0};
  const double r_max = pattern.r_max();
  if (r_max > 0.0 && point_probability(path_loss, fading, r_max, t) > 1e-6) {
    throw TruncationRiskError("h^-1(St) exceeds the pattern window with probability above 1e-6",
                              suggest_r_max(path_loss, fading, t, 1e-6));
  }
  return chunked_mean(n_samples, seed, [&](Rng& rng) {
    const double rho = std::min(path_loss.inverse(t * fading.sample(rng)), r_max);
    return static_cast<double>(pattern.radial_count(rho));
  });
}

Estimate monte_carlo_mean(const GrowthFunction& growth, const PathLoss& path_loss,
                          const Fading& fading, double t, std::size_t n_samples,
                          std::uint64_t seed) {
  if (n_samples < 100) throw ParameterError("Monte-Carlo estimates need >= 100 samples");
  if (!(t > 0.0)) return {0.0, 0.0};
  return chunked_mean(n_samples, seed, [&](Rng& rng) {
    return growth(path_loss.inverse(t * fading.sample(rng)));
  });
}

}  // namespace propsim
