#include "propsim/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <tuple>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "propsim/error.hpp"
#include "propsim/numeric.hpp"
#include "propsim/parallel.hpp"
#include "propsim/random.hpp"

namespace propsim {

std::vector<double> time_rescale(const PropagationProcess& process, const MeanMeasure& measure) {
  if (!process.tau()) throw ParameterError("time rescaling needs a tau-restricted process");
  const double tau = *process.tau();
  const double total = measure(tau);
  if (!(total > 0.0)) throw DegenerateError("M(tau) = 0: rescaling is undefined");
  std::vector<double> out;
  out.reserve(process.size());
  for (double t : process.values()) out.push_back(std::clamp(measure(t) / total, 0.0, 1.0));
  return out;
}

double kolmogorov_sf(double x) {
  if (!(x > 0.0)) return 1.0;
  constexpr double pi = std::numbers::pi;
  if (x < 1.0) {
    // Jacobi-transformed series, fast for small x.
    const double c = pi * pi / (8.0 * x * x);
    double s = 0.0;
    for (int j = 1; j <= 20; ++j) {
      const double k = 2.0 * j - 1.0;
      s += std::exp(-k * k * c);
    }
    return 1.0 - std::sqrt(2.0 * pi) / x * s;
  }
  double s = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * x * x);
    s += (j % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

namespace {

using Matrix = std::vector<double>;

void multiply(const Matrix& a, int ea, const Matrix& b, int eb, Matrix& c, int& ec, int m) {
  c.assign(static_cast<std::size_t>(m * m), 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (int k = 0; k < m; ++k) s += a[i * m + k] * b[k * m + j];
      c[i * m + j] = s;
    }
  }
  ec = ea + eb;
}

void power(const Matrix& a, int ea, Matrix& v, int& ev, int m, int n) {
  if (n == 1) {
    v = a;
    ev = ea;
    return;
  }
  Matrix half;
  int eh = 0;
  power(a, ea, half, eh, m, n / 2);
  Matrix sq;
  int esq = 0;
  multiply(half, eh, half, eh, sq, esq, m);
  if (n % 2 == 0) {
    v = std::move(sq);
    ev = esq;
  } else {
    multiply(a, ea, sq, esq, v, ev, m);
  }
  if (v[(m / 2) * m + m / 2] > 1e140) {
    for (double& x : v) x *= 1e-140;
    ev += 140;
  }
}

}  // namespace

double ks_exact_cdf(std::size_t n_points, double d) {
  if (n_points == 0) throw InsufficientDataError("KS distribution needs n >= 1");
  if (d <= 0.0) return 0.0;
  if (d >= 1.0) return 1.0;
  const int n = static_cast<int>(n_points);
  const double nd = n * d;
  const int k = static_cast<int>(nd) + 1;
  const int m = 2 * k - 1;
  const double h = k - nd;
  Matrix H(static_cast<std::size_t>(m * m));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) H[i * m + j] = (i - j + 1 < 0) ? 0.0 : 1.0;
  }
  for (int i = 0; i < m; ++i) {
    H[i * m] -= std::pow(h, i + 1);
    H[(m - 1) * m + i] -= std::pow(h, m - i);
  }
  H[(m - 1) * m] += (2.0 * h - 1.0 > 0.0 ? std::pow(2.0 * h - 1.0, m) : 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i - j + 1 > 0) {
        for (int g = 1; g <= i - j + 1; ++g) H[i * m + j] /= g;
      }
    }
  }
  Matrix Q;
  int eq = 0;
  power(H, 0, Q, eq, m, n);
  double s = Q[(k - 1) * m + k - 1];
  for (int i = 1; i <= n; ++i) {
    s = s * i / n;
    if (s < 1e-140) {
      s *= 1e140;
      eq -= 140;
    }
  }
  return std::clamp(s * std::pow(10.0, eq), 0.0, 1.0);
}

KSResult ks_uniform(std::span<const double> points) {
  if (points.empty()) throw InsufficientDataError("KS test needs at least one point");
  std::vector<double> u(points.begin(), points.end());
  std::sort(u.begin(), u.end());
  const auto n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double i1 = static_cast<double>(i + 1);
    d = std::max({d, i1 / n - u[i], u[i] - (i1 - 1.0) / n});
  }
  KSResult r;
  r.statistic = d;
  r.n = u.size();
  r.p_value = u.size() < 35 ? 1.0 - ks_exact_cdf(u.size(), d) : kolmogorov_sf(std::sqrt(n) * d);
  r.p_value = std::clamp(r.p_value, 0.0, 1.0);
  return r;
}

DispersionResult dispersion(std::span<const std::int64_t> counts, double level) {
  if (counts.size() < 2) throw InsufficientDataError("dispersion needs at least two counts");
  if (!(level > 0.0 && level < 1.0)) throw ParameterError("level must lie in (0, 1)");
  RunningStats stats;
  for (std::int64_t c : counts) {
    if (c < 0) throw ParameterError("counts must be non-negative");
    stats.push(static_cast<double>(c));
  }
  if (!(stats.mean() > 0.0)) throw DegenerateError("dispersion index undefined for zero mean");
  DispersionResult r;
  r.n = counts.size();
  r.mean = stats.mean();
  r.variance = stats.variance();
  r.index = r.variance / r.mean;
  const double dof = static_cast<double>(r.n - 1);
  boost::math::chi_squared_distribution<double> chi(dof);
  const double lo_q = boost::math::quantile(chi, level / 2.0);
  const double hi_q = boost::math::quantile(chi, 1.0 - level / 2.0);
  r.ci_lower = r.index * dof / hi_q;
  r.ci_upper = r.index * dof / lo_q;
  return r;
}

double count_fit(std::span<const std::int64_t> counts, double mean) {
  if (!(mean > 0.0)) throw ParameterError("Poisson mean must be positive");
  if (counts.empty()) throw InsufficientDataError("count fit needs counts");
  std::int64_t max_count = 0;
  for (std::int64_t c : counts) {
    if (c < 0) throw ParameterError("counts must be non-negative");
    max_count = std::max(max_count, c);
  }
  std::vector<double> freq(static_cast<std::size_t>(max_count) + 1, 0.0);
  for (std::int64_t c : counts) freq[static_cast<std::size_t>(c)] += 1.0;
  const auto n = static_cast<double>(counts.size());

  std::int64_t cutoff = max_count;
  while (cutoff < mean || boost::math::gamma_p(static_cast<double>(cutoff + 1), mean) > 1e-12) {
    ++cutoff;
  }
  double total = 0.0;
  for (std::int64_t k = 0; k <= cutoff; ++k) {
    const double emp = k <= max_count ? freq[static_cast<std::size_t>(k)] / n : 0.0;
    total += std::abs(emp - poisson_pmf(k, mean));
  }
  total += boost::math::gamma_p(static_cast<double>(cutoff + 1), mean);
  return std::clamp(0.5 * total, 0.0, 1.0);
}

double count_tv_null_quantile(std::size_t n_reps, double mean, double quantile, std::size_t n_sims,
                              std::uint64_t seed) {
  if (n_reps == 0 || n_sims == 0) throw ParameterError("null calibration needs reps and sims");
  if (!(quantile > 0.0 && quantile < 1.0)) throw ParameterError("quantile must lie in (0, 1)");
  using Key = std::tuple<std::size_t, double, double, std::size_t, std::uint64_t>;
  static std::mutex mutex;
  static std::map<Key, double> cache;
  const Key key{n_reps, mean, quantile, n_sims, seed};
  {
    std::lock_guard<std::mutex> lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto stats = parallel_map<double>(n_sims, [&](std::size_t s) {
    Rng rng = make_rng(derive_seed(seed, s));
    std::poisson_distribution<std::int64_t> poisson(mean);
    std::vector<std::int64_t> counts(n_reps);
    for (auto& c : counts) c = poisson(rng);
    return count_fit(counts, mean);
  });
  std::sort(stats.begin(), stats.end());
  const double pos = quantile * static_cast<double>(n_sims - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, n_sims - 1);
  const double value = stats[lo] + (pos - static_cast<double>(lo)) * (stats[hi] - stats[lo]);
  std::lock_guard<std::mutex> lock(mutex);
  cache.emplace(key, value);
  return value;
}

const char* to_string(Verdict verdict) noexcept {
  switch (verdict) {
    case Verdict::poisson_consistent:
      return "poisson_consistent";
    case Verdict::overdispersed:
      return "overdispersed";
    case Verdict::underdispersed:
      return "underdispersed";
    case Verdict::mean_mismatch:
      return "mean_mismatch";
  }
  return "unknown";
}

GoFReport goodness_of_fit(std::span<const PropagationProcess> replications,
                          const MeanMeasure& measure, double tau, const GoFOptions& options) {
  if (replications.size() < 2) throw InsufficientDataError("goodness of fit needs >= 2 replications");
  if (!(tau > 0.0)) throw ParameterError("tau must be positive");
  const double total = measure(tau);
  if (!(total > 0.0)) throw DegenerateError("M(tau) = 0");
  const double per_test = options.level / 3.0;

  GoFReport r;
  r.n_reps = replications.size();
  r.tau = tau;
  r.expected_count = total;

  std::vector<std::int64_t> counts;
  counts.reserve(replications.size());
  std::vector<double> pooled;
  for (const auto& rep : replications) {
    const std::size_t c = rep.count(tau);
    counts.push_back(static_cast<std::int64_t>(c));
    for (std::size_t i = 0; i < c; ++i) {
      pooled.push_back(std::clamp(measure(rep.values()[i]) / total, 0.0, 1.0));
    }
  }
  const DispersionResult disp = dispersion(counts, per_test);
  r.mean_count = disp.mean;
  r.mean_count_se = std::sqrt(disp.variance / static_cast<double>(disp.n));
  r.dispersion_index = disp.index;
  r.dispersion_ci_lower = disp.ci_lower;
  r.dispersion_ci_upper = disp.ci_upper;

  const KSResult ks = ks_uniform(pooled);
  r.n_points = ks.n;
  r.ks_statistic = ks.statistic;
  r.ks_p_value = ks.p_value;

  r.count_tv = count_fit(counts, total);
  r.count_tv_threshold = options.count_tv_threshold
                             ? *options.count_tv_threshold
                             : count_tv_null_quantile(counts.size(), total, 1.0 - per_test,
                                                      options.null_sims, options.null_seed);

  if (disp.ci_lower > 1.0) {
    r.verdict = Verdict::overdispersed;
  } else if (disp.ci_upper < 1.0) {
    r.verdict = Verdict::underdispersed;
  } else if (ks.p_value <= per_test || r.count_tv > r.count_tv_threshold) {
    r.verdict = Verdict::mean_mismatch;
  } else {
    r.verdict = Verdict::poisson_consistent;
  }
  return r;
}

}  // namespace propsim
