// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "propsim/config.hpp"
#include "propsim/diagnostics.hpp"
#include "propsim/experiment.hpp"
#include "propsim/mean_measure.hpp"
#include "propsim/numeric.hpp"
#include "propsim/parallel.hpp"
#include "propsim/path_loss.hpp"
#include "propsim/poisson_approx.hpp"
#include "propsim/propagation.hpp"
#include "propsim/random.hpp"
#include "propsim/simulate.hpp"

using namespace propsim;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

MeanMeasure tabulated(const RestrictedSimulator& sim, double tau) {
  return MeanMeasure::tabulate([sim](double t) { return sim.mean_measure(t); }, tau * 1e-9, tau, 129);
}

// 1. N is exactly Poisson for Poisson transmitters.
Outcome poisson_exactness() {
  const double tau = std::pow(5.0 / kPi, 2);
  const Fading fading = Fading::exponential(std::pow(std::tgamma(1.5), 2));
  const PathLoss pl = PathLoss::power_law(1.0, 4.0);
  const RestrictedSimulator sim(PoissonSource{1.0}, pl, fading, tau);
  const auto reps = sim.simulate_batch(10000, 0xac01);
  const MeanMeasure m(MeanMeasure::Kind::closed_form,
                      [fading](double t) { return closed_form_power_law(1.0, 1.0, 4.0, fading, t); });
  const GoFReport g = goodness_of_fit(reps, m, tau);
  const double target = kPi * std::sqrt(tau);
  const bool ok = g.verdict == Verdict::poisson_consistent && g.dispersion_index >= 0.95 &&
                  g.dispersion_index <= 1.05 && std::abs(g.mean_count - target) <= 3.0 * g.mean_count_se;
  return {ok, fmt("verdict=%s dispersion=%.4f mean=%.4f target=%.4f se=%.4f", to_string(g.verdict),
                  g.dispersion_index, g.mean_count, target, g.mean_count_se)};
}

// 2. Exact count-law distance of a two-point pattern lies inside the bracket.
Outcome tv_bracket() {
  Rng rng = make_rng(0xac02);
  const PathLoss pl = PathLoss::power_law(1.0, 4.0);
  const Fading fading = Fading::exponential(1.0);
  int violations = 0;
  double worst_ratio = 0.0;
  for (int c = 0; c < 20; ++c) {
    const double r1 = 0.2 + 1.3 * uniform01(rng);
    const double r2 = 0.2 + 1.3 * uniform01(rng);
    const PointPattern2D pattern = PointPattern2D::from_radii({r1, r2}, 2.0);
    const TVBoundReport b = tv_bounds(pattern, pl, fading, 1.0, Window::complete);
    const double p1 = point_probability(pl, fading, r1, 1.0);
    const double p2 = point_probability(pl, fading, r2, 1.0);
    const double q[3] = {(1 - p1) * (1 - p2), p1 * (1 - p2) + p2 * (1 - p1), p1 * p2};
    const double lambda = p1 + p2;
    double tv = 0.0;
    double head = 0.0;
    for (int k = 0; k < 3; ++k) {
      tv += std::abs(q[k] - poisson_pmf(k, lambda));
      head += poisson_pmf(k, lambda);
    }
    tv = 0.5 * (tv + (1.0 - head));
    if (tv < b.lower || tv > b.upper) ++violations;
    worst_ratio = std::max(worst_ratio, tv / b.upper);
  }
  return {violations == 0, fmt("violations=%d max(d_TV/upper)=%.4f", violations, worst_ratio)};
}

// 3. Lattice with growing lognormal sigma approaches its Poisson limit.
Outcome sigma_convergence() {
  const PathLoss pl = PathLoss::power_law(1.0, 4.0);
  const double sigmas[] = {1.0, 2.0, 4.0, 8.0};
  std::vector<double> sums;
  for (double s : sigmas) {
    const RestrictedSimulator sim(LatticeSource{LatticeKind::square, 1.0}, pl, Fading::lognormal(s, 4.0), 1.0);
    sums.push_back(tv_bounds(sim).sum_p_sq);
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < sums.size(); ++i) decreasing = decreasing && sums[i] < sums[i - 1];
  const RestrictedSimulator sim(LatticeSource{LatticeKind::square, 1.0}, pl, Fading::lognormal(8.0, 4.0), 1.0);
  const auto reps = sim.simulate_batch(10000, 0xac03);
  const GoFReport g = goodness_of_fit(reps, tabulated(sim, 1.0), 1.0);
  const double rel = std::abs(g.mean_count - kPi) / kPi;
  const bool ok = decreasing && rel <= 0.05 && g.dispersion_index >= 0.9 && g.dispersion_index <= 1.1 &&
                  g.ks_p_value > 0.01;
  return {ok, fmt("sum p^2 = %.4g, %.4g, %.4g, %.4g; sigma=8: mean=%.4f (rel %.3f) dispersion=%.4f ks_p=%.3f",
                  sums[0], sums[1], sums[2], sums[3], g.mean_count, rel, g.dispersion_index, g.ks_p_value)};
}

// 4. Closed forms against Monte Carlo.
Outcome mean_measure_cross_validation() {
  struct Case {
    const char* name;
    double lambda;
    PathLoss pl;
    Fading fading;
    double t;
    std::function<double()> closed;
  };
  const Fading ln2 = Fading::lognormal(2.0, 4.0);
  const Fading ln1 = Fading::lognormal(1.0, 4.0);
  const Fading ex = Fading::exponential(1.0);
  const PathLoss ms = PathLoss::multi_slope({1.0, 10.0}, {2.0, 3.0, 4.0}, 1.0);
  const double tiny = 1e-9;
  std::vector<Case> cases = {
      {"power_law", 1.0, PathLoss::power_law(1.0, 4.0), ln2, 1.0,
       [&] { return closed_form_power_law(1.0, 1.0, 4.0, ln2, 1.0); }},
      {"power_law_K2", 0.5, PathLoss::power_law(2.0, 3.0), ex, 5.0,
       [&] { return closed_form_power_law(0.5, 2.0, 3.0, ex, 5.0); }},
      {"multi_slope", 1.0, ms, ln1, 50.0, [&] { return multislope_mean(1.0, ms, ln1, 50.0); }},
      {"lambert", 1.0, PathLoss::exp_power(0.1, 2.0), ex, 10.0,
       [&] { return closed_form_lambert(1.0, 0.1, 2.0, ex, 10.0).value; }},
      {"lambert_alpha0", 1.0, PathLoss::exp_power(tiny, 4.0), ln1, 2.0,
       [&] { return closed_form_lambert(1.0, tiny, 4.0, ln1, 2.0).value; }},
  };
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const Case& c = cases[i];
    const double closed = c.closed();
    const Estimate mc = monte_carlo_mean(GrowthFunction::disk_area(c.lambda), c.pl, c.fading, c.t, 100000,
                                         derive_seed(0xac04, i));
    const double z = std::abs(closed - mc.value) / mc.std_error;
    ok = ok && z <= 3.0;
    detail += fmt("%s z=%.2f; ", c.name, z);
  }
  const double lam = closed_form_lambert(1.0, tiny, 4.0, ln1, 2.0).value;
  const double pw = closed_form_power_law(1.0, 1.0, 4.0, ln1, 2.0);
  const double rel = std::abs(lam - pw) / pw;
  ok = ok && rel <= 1e-6;
  detail += fmt("alpha->0 rel.err=%.2e", rel);
  return {ok, detail};
}

// 5. alpha-Ginibre moments and pair correlation; Poisson-like propagation
// under strong shadowing.
Outcome ginibre_validation() {
  const GinibreParams gp{0.5, 1.0};
  const std::size_t n = 10000;
  const auto cutoff = ginibre_index_cutoff(gp, 3.0);
  const auto counts = parallel_map<double>(n, [&](std::size_t i) {
    return static_cast<double>(sample_alpha_ginibre_radial(gp, 3.0, derive_seed(0xac05, i), cutoff).size());
  });
  RunningStats stats;
  for (double c : counts) stats.push(c);
  double m4 = 0.0;
  for (double c : counts) m4 += std::pow(c - stats.mean(), 4);
  m4 /= static_cast<double>(n);
  const double var = stats.variance();
  const double var_se = std::sqrt(std::max(0.0, m4 - var * var) / static_cast<double>(n));
  const bool mean_ok = std::abs(stats.mean() - 9.0) <= 3.0 * stats.std_error();
  const bool var_ok = var <= 9.0 + 3.0 * var_se;

  const double us[] = {0.2, 0.5, 1.0};
  const auto pc = ginibre_pair_correlation(gp, 6.0, us, 0.05, n, 0xac15);
  bool pc_ok = true;
  std::string pc_detail;
  for (const auto& p : pc) {
    pc_ok = pc_ok && std::abs(p.estimate - p.target) <= 3.0 * p.std_error;
    pc_detail += fmt("g(%.1f)=%.4f+-%.4f target=%.4f(1-e^-2u^2=%.4f) ", p.u, p.estimate,
                     p.std_error, p.target, -std::expm1(-2.0 * p.u * p.u));
  }

  const double tau = 16.0;
  const PathLoss pl = PathLoss::power_law(1.0, 4.0);
  const Fading shadow = Fading::lognormal(6.0, 4.0);
  const RestrictedSimulator sim(GinibreSource{gp, suggest_r_max(pl, shadow, tau, 1e-6)}, pl, shadow,
                                tau);
  const auto reps = sim.simulate_batch(n, 0xac25);
  const GoFReport g = goodness_of_fit(reps, tabulated(sim, tau), tau);
  const bool gof_ok = g.verdict == Verdict::poisson_consistent;
  return {mean_ok && var_ok && pc_ok && gof_ok,
          fmt("E|Xi|(3)=%.4f+-%.4f Var=%.4f+-%.4f ", stats.mean(), stats.std_error(), var, var_se) +
              pc_detail +
              fmt("sigma=6 verdict=%s mean=%.4f+-%.4f M=%.4f dispersion=%.4f [%.4f,%.4f] ks_p=%.3g "
                  "count_tv=%.4f/%.4f",
                  to_string(g.verdict), g.mean_count, g.mean_count_se, g.expected_count,
                  g.dispersion_index, g.dispersion_ci_lower, g.dispersion_ci_upper, g.ks_p_value,
                  g.count_tv, g.count_tv_threshold)};
}

// 6. Cox mixtures and shared fading factors are detected; i.i.d. fading is not.
Outcome cox_discrimination() {
  const double r_grid[] = {20.0};
  const auto vr = variance_ratio(
      [](std::uint64_t s) { return sample_cox_mixture(1.0, 3.0, 20.0, s); }, r_grid, 4000, 0xac06);
  const bool ratio_ok = std::abs(vr[0].ratio - 0.25) <= 0.025;

  const PathLoss pl = PathLoss::power_law(1.0, 4.0);
  const double tau = std::pow(5.0 / kPi, 2);
  const Fading shared = Fading::shared_factor(Fading::lognormal(1.0, 4.0), Fading::exponential(kPi / 4.0));
  const MeanMeasure m(MeanMeasure::Kind::closed_form,
                      [shared](double t) { return closed_form_power_law(1.0, 1.0, 4.0, shared, t); });
  const RestrictedSimulator sim(PoissonSource{1.0}, pl, shared, tau);
  const std::size_t meta = 1000;
  std::size_t flagged = 0;
  for (std::size_t k = 0; k < meta; ++k) {
    const auto reps = sim.simulate_batch(10000, derive_seed(0xac16, k));
    if (goodness_of_fit(reps, m, tau).verdict == Verdict::overdispersed) ++flagged;
  }

  const Fading iid = Fading::product({Fading::lognormal(1.0, 4.0), Fading::exponential(kPi / 4.0)});
  const RestrictedSimulator iid_sim(PoissonSource{1.0, 10.0}, pl, iid, tau);
  const MeanMeasure iid_m = tabulated(iid_sim, tau);
  const std::size_t iid_meta = 100;
  std::size_t consistent = 0;
  for (std::size_t k = 0; k < iid_meta; ++k) {
    const auto reps = iid_sim.simulate_batch(10000, derive_seed(0xac26, k));
    if (goodness_of_fit(reps, iid_m, tau).verdict == Verdict::poisson_consistent) ++consistent;
  }
  const bool ok = ratio_ok && flagged * 100 >= meta * 95 && consistent * 100 >= iid_meta * 95;
  return {ok, fmt("ratio(20)=%.4f+-%.4f shared: %zu/%zu overdispersed; iid: %zu/%zu poisson_consistent",
                  vr[0].ratio, vr[0].std_error, flagged, meta, consistent, iid_meta)};
}

// 7. Lambert W accuracy.
Outcome lambert() {
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double y = std::pow(10.0, -6.0 + 12.0 * i / 999.0);
    const double w = lambert_w(y);
    worst = std::max(worst, std::abs(w * std::exp(w) - y) / std::max(1.0, y));
  }
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * std::exp(mid) < 1.0 ? lo : hi) = mid;
  }
  const double w1 = lambert_w(1.0);
  const bool ok = worst <= 1e-12 && std::abs(w1 - lo) <= 1e-9 && std::abs(w1 - 0.5671432904) <= 1e-9;
  return {ok, fmt("max scaled residual=%.2e W(1)=%.12f bisection=%.12f", worst, w1, lo)};
}

// 8. Generalized inverse against a 10^6-point grid.
Outcome generalized_inverse() {
  struct Case {
    const char* name;
    PathLoss pl;
    double x_max;
    std::vector<double> exact_y;  // y values with a known exact inverse
    std::vector<double> exact_x;
  };
  const PathLoss ms = PathLoss::multi_slope({1.0, 10.0}, {2.0, 3.0, 4.0}, 1.0);
  const auto& th = ms.as_multi_slope()->thresholds;
  std::vector<Case> cases = {
      {"power_law", PathLoss::power_law(1.0, 4.0), 20.0, {1.0, 16.0}, {1.0, 2.0}},
      {"multi_slope", ms, 20.0, {th[0], th[1]}, {1.0, 10.0}},
      {"tabulated", PathLoss::tabulated({1.0, 2.0, 3.0, 5.0}, {1.0, 2.0, 2.0, 4.0, 8.0}), 20.0,
       {0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 7.9}, {0.0, 1.0, 1.0, 3.0, 3.0, 5.0, 5.0}},
  };
  const std::size_t n = 1000000;
  std::size_t mismatches = 0;
  std::size_t checks = 0;
  std::string detail;
  for (const Case& c : cases) {
    std::vector<double> x(n), h(n);
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = c.x_max * static_cast<double>(k + 1) / static_cast<double>(n);
      h[k] = c.pl.evaluate(x[k]);
    }
    std::size_t bad = 0;
    for (std::size_t i = 0; i < 2000; ++i) {
      const double y = h.front() + (h.back() - h.front()) * static_cast<double>(i) / 2000.0;
      const auto k = static_cast<std::size_t>(std::upper_bound(h.begin(), h.end(), y) - h.begin());
      const double inv = c.pl.inverse(y);
      const double left = k == 0 ? 0.0 : x[k - 1];
      const double right = k == n ? std::numeric_limits<double>::infinity() : x[k];
      // h(x[k-1]) <= y < h(x[k]) pins the infimum to [x[k-1], x[k]].
      if (!(inv >= left && inv <= right)) ++bad;
      ++checks;
    }
    for (std::size_t i = 0; i < c.exact_y.size(); ++i) {
      const double inv = c.pl.inverse(c.exact_y[i]);
      const bool exact = c.pl.strictly_increasing()
                             ? std::abs(inv - c.exact_x[i]) <= 1e-12 * c.exact_x[i]
                             : inv == c.exact_x[i];
      if (!exact) ++bad;
      ++checks;
    }
    if (!c.pl.strictly_increasing() && !std::isinf(c.pl.inverse(8.0))) ++bad;
    mismatches += bad;
    detail += fmt("%s:%zu ", c.name, bad);
  }
  return {mismatches == 0, fmt("mismatches over %zu checks: ", checks) + detail};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 9. converge output does not depend on the thread count.
Outcome reproducibility() {
  const auto root = std::filesystem::temp_directory_path() / "propsim_acceptance_repro";
  std::filesystem::remove_all(root);
  const std::string json = R"({
    "pattern": {"kind": "lattice", "lattice": "square", "edge_length": 1},
    "path_loss": {"kind": "power_law", "K": 1, "beta": 4},
    "fading": {"kind": "lognormal", "sigma": 1, "sigma_sweep": [1, 2, 4, 8]},
    "tau": 1, "n_reps": 2000, "seed": 99, "diagnostics": {"null_sims": 200}
  })";
  const std::size_t saved = thread_count();
  std::vector<std::string> outputs[2];
  const std::size_t threads[2] = {1, 8};
  for (int run = 0; run < 2; ++run) {
    const auto dir = root / ("threads" + std::to_string(threads[run]));
    const ExperimentConfig cfg = parse_config(json, {{"output_dir", "\"" + dir.string() + "\""}});
    set_thread_count(threads[run]);
    for (const auto& path : run_experiment("converge", cfg)) {
      outputs[run].push_back(slurp(path));
      outputs[run].push_back(slurp(path + ".meta.json"));
    }
  }
  set_thread_count(saved);
  const bool ok = !outputs[0].empty() && outputs[0] == outputs[1];
  return {ok, fmt("%zu files compared", outputs[0].size())};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "poisson_exactness", poisson_exactness},
      {2, "tv_bracket", tv_bracket},
      {3, "sigma_convergence", sigma_convergence},
      {4, "mean_measure_cross_validation", mean_measure_cross_validation},
      {5, "ginibre_validation", ginibre_validation},
      {6, "cox_discrimination", cox_discrimination},
      {7, "lambert_w", lambert},
      {8, "generalized_inverse", generalized_inverse},
      {9, "reproducibility", reproducibility},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("AC%d %-30s %s  [%.1fs] %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
