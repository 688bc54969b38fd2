#include "propsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>

#include <json.hpp>

#include "propsim/diagnostics.hpp"
#include "propsim/error.hpp"
#include "propsim/io.hpp"
#include "propsim/mean_measure.hpp"
#include "propsim/numeric.hpp"
#include "propsim/parallel.hpp"
#include "propsim/poisson_approx.hpp"
#include "propsim/propagation.hpp"
#include "propsim/random.hpp"

#ifndef PROPSIM_VERSION
#define PROPSIM_VERSION "0.0.0"
#endif

namespace propsim {

using json = nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;
constexpr double kSampleGuard = 1e-6;
// Mean measures used for time rescaling are tabulated on this many
// log-spaced points over [tau * kTableFloor, tau].
constexpr std::size_t kTablePoints = 129;
constexpr double kTableFloor = 1e-9;

struct Law {
  std::optional<double> sigma;
  Fading fading;
};

std::vector<Law> laws(const ExperimentConfig& cfg) {
  if (cfg.sigma_sweep.empty()) return {Law{std::nullopt, cfg.fading}};
  std::vector<Law> out;
  for (double s : cfg.sigma_sweep) out.push_back(Law{s, cfg.fading.with_sigma(s)});
  return out;
}

json sigma_json(const std::optional<double>& sigma) {
  return sigma ? json(*sigma) : json(nullptr);
}

std::string sigma_cell(const std::optional<double>& sigma) {
  return sigma ? format_double(*sigma) : std::string();
}

class Artifacts {
 public:
  Artifacts(const ExperimentConfig& cfg, std::string subcommand)
      : cfg_(cfg), subcommand_(std::move(subcommand)) {}

  void write(const std::string& name, const std::string& contents) {
    const std::string path = join_path(cfg_.output_dir, name);
    write_file(path, contents);
    json meta = {{"file", name},
                 {"subcommand", subcommand_},
                 {"version", version()},
                 {"config_hash", hex64(cfg_.hash)},
                 {"seed", cfg_.seed},
                 {"config", json::parse(cfg_.canonical_json)}};
    write_file(path + ".meta.json", meta.dump(2) + "\n");
    paths_.push_back(path);
  }

  void write_json(const std::string& name, const json& value) { write(name, value.dump(2) + "\n"); }

  std::vector<std::string> paths() const { return paths_; }

 private:
  const ExperimentConfig& cfg_;
  std::string subcommand_;
  std::vector<std::string> paths_;
};

PointPattern2D read_pattern(const ExperimentConfig& cfg) {
  const CsvTable table = read_csv(cfg.pattern.path);
  const std::string field = "pattern.path";
  std::vector<Point2> points;
  std::vector<double> radii;
  if (table.has_column("x") && table.has_column("y")) {
    const auto cx = table.column("x", field);
    const auto cy = table.column("y", field);
    for (const auto& row : table.rows) points.push_back({row[cx], row[cy]});
  } else if (table.has_column("r")) {
    const auto cr = table.column("r", field);
    for (const auto& row : table.rows) radii.push_back(row[cr]);
  } else {
    throw ConfigError(field, "pattern CSV needs columns x,y or r");
  }
  double far = 0.0;
  for (const auto& p : points) far = std::max(far, p.norm());
  for (double r : radii) far = std::max(far, r);
  const double r_max = cfg.r_max.value_or(far > 0.0 ? far : 1.0);
  if (far > r_max) throw ConfigError("r_max", "pattern has points beyond r_max");
  Provenance prov{"csv", {}, 0};
  try {
    if (!radii.empty()) return PointPattern2D::from_radii(std::move(radii), r_max, prov);
    return PointPattern2D(std::move(points), r_max, prov);
  } catch (const ParameterError& e) {
    throw ConfigError(field, e.what());
  }
}

void require_spatial(const ExperimentConfig& cfg, const std::string& subcommand) {
  if (cfg.pattern.kind == PatternKind::probabilities) {
    throw ConfigError("pattern.kind", subcommand + " needs a spatial pattern, not probabilities");
  }
}

double source_radius(const RadialSource& source) {
  if (const auto* f = std::get_if<FiniteSource>(&source)) return f->pattern.r_max();
  if (const auto* p = std::get_if<PoissonSource>(&source)) return p->r_max;
  if (const auto* c = std::get_if<CoxMixtureSource>(&source)) return c->r_max;
  if (const auto* g = std::get_if<GinibreSource>(&source)) return g->r_max;
  return kInf;
}

// Throws when transmitters beyond the simulated disk would reach (0, tau]
// with probability above eps.
void check_window(const ExperimentConfig& cfg, const RadialSource& source, const Fading& fading,
                  double eps) {
  if (cfg.pattern.window != Window::truncated) return;
  const double r = source_radius(source);
  if (!std::isfinite(r)) return;
  if (point_probability(cfg.path_loss, fading, r, cfg.tau) > eps) {
    throw TruncationRiskError("transmitters beyond r_max = " + format_double(r) +
                                  " reach (0, tau] with non-negligible probability",
                              suggest_r_max(cfg.path_loss, fading, cfg.tau, eps));
  }
}

RestrictedSimulator make_simulator(const ExperimentConfig& cfg, const RadialSource& source,
                                   const Fading& fading, double tau) {
  return RestrictedSimulator(source, cfg.path_loss, fading, tau);
}

MeanMeasure tabulated_measure(const RestrictedSimulator& sim, double tau) {
  return MeanMeasure::tabulate([sim](double t) { return sim.mean_measure(t); }, tau * kTableFloor,
                               tau, kTablePoints);
}

struct Bounds {
  TVBoundReport report;
  std::string method;
};

Bounds compute_bounds(const ExperimentConfig& cfg, const Fading& fading) {
  if (cfg.pattern.kind == PatternKind::probabilities) {
    return {tv_bounds_from_probabilities(cfg.pattern.probabilities, cfg.tau), "probabilities"};
  }
  const RadialSource source = make_source(cfg);
  if (const auto* f = std::get_if<FiniteSource>(&source)) {
    return {tv_bounds(f->pattern, cfg.path_loss, fading, cfg.tau, cfg.pattern.window), "finite"};
  }
  const RestrictedSimulator sim = make_simulator(cfg, source, fading, cfg.tau);
  if (!source_is_random(source)) return {tv_bounds(sim), "lattice"};
  check_window(cfg, source, fading, 1e-12);
  TVBoundReport r;
  r.tau = cfg.tau;
  r.sum_p = sim.mean_measure(cfg.tau);
  r.sum_p_sq = sim.sum_p_squared(cfg.tau);
  r.upper_unclipped = r.sum_p_sq;
  r.upper = std::min(1.0, r.sum_p_sq);
  r.lower = 0.0;
  r.max_p = sim.max_p(cfg.tau);
  r.mean_times_max_p = r.sum_p * r.max_p;
  r.power_floor = 1.0 / cfg.tau;
  return {r, "cox"};
}

json bounds_json(const Bounds& b, const std::optional<double>& sigma) {
  const TVBoundReport& r = b.report;
  return {{"sigma", sigma_json(sigma)},
          {"method", b.method},
          {"side", to_string(r.side)},
          {"tau", r.tau},
          {"mean", r.sum_p},
          {"sum_p_sq", r.sum_p_sq},
          {"upper", r.upper},
          {"upper_unclipped", r.upper_unclipped},
          {"lower", r.lower},
          {"max_p", r.max_p},
          {"mean_times_max_p", r.mean_times_max_p},
          {"n_points", r.n_points},
          {"power_floor", r.power_floor}};
}

json gof_json(const GoFReport& g, const std::optional<double>& sigma) {
  return {{"sigma", sigma_json(sigma)},
          {"n_reps", g.n_reps},
          {"tau", g.tau},
          {"expected_count", g.expected_count},
          {"mean_count", g.mean_count},
          {"mean_count_se", g.mean_count_se},
          {"dispersion_index", g.dispersion_index},
          {"dispersion_ci", {g.dispersion_ci_lower, g.dispersion_ci_upper}},
          {"n_points", g.n_points},
          {"ks_statistic", g.ks_statistic},
          {"ks_p_value", g.ks_p_value},
          {"count_tv", g.count_tv},
          {"count_tv_threshold", g.count_tv_threshold},
          {"verdict", to_string(g.verdict)}};
}

GoFOptions gof_options(const ExperimentConfig& cfg, std::size_t k) {
  GoFOptions opt;
  opt.level = cfg.level;
  opt.null_sims = cfg.null_sims;
  opt.null_seed = derive_seed(cfg.seed, 0x10000 + k);
  return opt;
}

// ---- sample ----

std::vector<std::string> run_sample(const ExperimentConfig& cfg) {
  require_spatial(cfg, "sample");
  const auto ls = laws(cfg);
  const RadialSource source = make_source(cfg);
  const std::uint64_t pattern_seed = derive_seed(cfg.seed, 0);

  double radius = source_radius(source);
  if (!std::isfinite(radius)) {
    radius = 0.0;
    for (const auto& law : ls) {
      radius = std::max(radius, suggest_r_max(cfg.path_loss, law.fading, cfg.tau, kSampleGuard));
    }
    if (!std::isfinite(radius)) {
      throw TruncationRiskError("no finite disk captures N restricted to (0, tau]", radius);
    }
  } else {
    for (const auto& law : ls) check_window(cfg, source, law.fading, kSampleGuard);
  }

  PointPattern2D pattern = std::visit(
      [&](const auto& s) -> PointPattern2D {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FiniteSource>) {
          return s.pattern;
        } else if constexpr (std::is_same_v<T, LatticeSource>) {
          return make_lattice(s.kind, s.edge_length, radius);
        } else if constexpr (std::is_same_v<T, PoissonSource>) {
          return sample_poisson(s.intensity, radius, pattern_seed);
        } else if constexpr (std::is_same_v<T, CoxMixtureSource>) {
          return sample_cox_mixture(s.lambda1, s.lambda2, radius, pattern_seed);
        } else {
          return sample_alpha_ginibre(s.params, radius, pattern_seed);
        }
      },
      source);

  Artifacts out(cfg, "sample");
  CsvWriter pat({"x", "y"});
  for (const auto& p : pattern.points()) pat.cell(p.x).cell(p.y).end_row();
  out.write("pattern.csv", pat.text());

  CsvWriter prop({"sigma", "y"});
  for (std::size_t k = 0; k < ls.size(); ++k) {
    const PropagationProcess full =
        generate(pattern, cfg.path_loss, ls[k].fading, derive_seed(cfg.seed, k + 1));
    const PropagationProcess n = restrict_to(full, cfg.tau);
    for (double y : n.values()) prop.cell(sigma_cell(ls[k].sigma)).cell(y).end_row();
  }
  out.write("propagation.csv", prop.text());
  return out.paths();
}

// ---- mean-measure ----

using Evaluator = std::function<Estimate(double t, std::uint64_t seed)>;

std::vector<std::string> run_mean_measure(const ExperimentConfig& cfg) {
  require_spatial(cfg, "mean-measure");
  if (cfg.t_grid.empty()) throw ConfigError("t_grid", "missing required field");
  const double t_top = *std::max_element(cfg.t_grid.begin(), cfg.t_grid.end());
  const auto ls = laws(cfg);
  const RadialSource source = make_source(cfg);
  const PathLoss& pl = cfg.path_loss;
  const double r_max = source_radius(source);
  const std::size_t mc = cfg.mc_samples;

  CsvWriter csv({"sigma", "t", "evaluator", "M", "stderr"});
  for (std::size_t k = 0; k < ls.size(); ++k) {
    const Fading& f = ls[k].fading;
    std::vector<std::pair<std::string, Evaluator>> evals;
    auto exact = [](double v) { return Estimate{v, 0.0}; };

    if (const auto* fin = std::get_if<FiniteSource>(&source)) {
      const PointPattern2D& pattern = fin->pattern;
      evals.emplace_back("exact_sum", [&, exact](double t, std::uint64_t) {
        return exact(exact_sum(pattern, pl, f, t));
      });
      if (cfg.pattern.window == Window::truncated) {
        evals.emplace_back("monte_carlo", [&](double t, std::uint64_t seed) {
          return monte_carlo_mean(pattern, pl, f, t, mc, seed);
        });
      }
    } else if (const auto* lat = std::get_if<LatticeSource>(&source)) {
      const RestrictedSimulator sim = make_simulator(cfg, source, f, t_top);
      const GrowthFunction growth = GrowthFunction::lattice(lat->kind, lat->edge_length);
      evals.emplace_back("lattice_sum", [sim, exact](double t, std::uint64_t) {
        return exact(sim.mean_measure(t));
      });
      evals.emplace_back("intensity_mean", [&, growth, exact](double t, std::uint64_t) {
        return exact(intensity_mean(growth, pl, f, t));
      });
      evals.emplace_back("monte_carlo", [&, growth](double t, std::uint64_t seed) {
        return monte_carlo_mean(growth, pl, f, t, mc, seed);
      });
    } else {
      double intensity = 0.0;
      if (const auto* p = std::get_if<PoissonSource>(&source)) intensity = p->intensity;
      if (const auto* c = std::get_if<CoxMixtureSource>(&source)) intensity = 0.5 * (c->lambda1 + c->lambda2);
      if (const auto* g = std::get_if<GinibreSource>(&source)) intensity = g->params.c / kPi;
      const GrowthFunction growth = GrowthFunction::disk_area(intensity);
      const bool infinite = !std::isfinite(r_max);
      if (std::holds_alternative<PoissonSource>(source) && infinite) {
        if (const auto* pw = pl.as_power_law()) {
          const double K = pw->K;
          const double beta = pw->beta;
          evals.emplace_back("closed_form_power_law", [&, K, beta, intensity, exact](double t, std::uint64_t) {
            return exact(closed_form_power_law(intensity, K, beta, f, t));
          });
        } else if (const auto* ep = pl.as_exp_power()) {
          const double alpha = ep->alpha;
          const double beta = ep->beta;
          evals.emplace_back("closed_form_lambert", [&, alpha, beta, intensity](double t, std::uint64_t) {
            return closed_form_lambert(intensity, alpha, beta, f, t);
          });
        } else if (pl.as_multi_slope()) {
          evals.emplace_back("multislope_mean", [&, intensity, exact](double t, std::uint64_t) {
            return exact(multislope_mean(intensity, pl, f, t));
          });
        }
      }
      evals.emplace_back("intensity_mean", [&, growth, r_max, exact](double t, std::uint64_t) {
        return exact(intensity_mean(growth, pl, f, t, 0.0, r_max));
      });
      if (!std::holds_alternative<PoissonSource>(source)) {
        const RestrictedSimulator sim = make_simulator(cfg, source, f, t_top);
        evals.emplace_back("simulator", [sim, exact](double t, std::uint64_t) {
          return exact(sim.mean_measure(t));
        });
      }
      if (infinite) {
        evals.emplace_back("monte_carlo", [&, growth](double t, std::uint64_t seed) {
          return monte_carlo_mean(growth, pl, f, t, mc, seed);
        });
      }
    }

    for (std::size_t i = 0; i < cfg.t_grid.size(); ++i) {
      const double t = cfg.t_grid[i];
      for (std::size_t e = 0; e < evals.size(); ++e) {
        const std::uint64_t seed = derive_seed(derive_seed(cfg.seed, k), i * evals.size() + e);
        const Estimate m = evals[e].second(t, seed);
        csv.cell(sigma_cell(ls[k].sigma)).cell(t).cell(evals[e].first).cell(m.value).cell(m.std_error);
        csv.end_row();
      }
    }
  }
  Artifacts out(cfg, "mean-measure");
  out.write("mean_measure.csv", csv.text());
  return out.paths();
}

// ---- tv-bound ----

std::vector<std::string> run_tv_bound(const ExperimentConfig& cfg) {
  json reports = json::array();
  for (const auto& law : laws(cfg)) reports.push_back(bounds_json(compute_bounds(cfg, law.fading), law.sigma));
  Artifacts out(cfg, "tv-bound");
  out.write_json("tv_bounds.json", reports);
  return out.paths();
}

// ---- converge ----

std::vector<std::string> run_converge(const ExperimentConfig& cfg) {
  require_spatial(cfg, "converge");
  const auto ls = laws(cfg);
  const RadialSource source = make_source(cfg);
  json bounds = json::array();
  json gofs = json::array();
  CsvWriter summary({"sigma", "upper", "lower", "dispersion", "ks_p", "count_tv"});
  for (std::size_t k = 0; k < ls.size(); ++k) {
    const Bounds b = compute_bounds(cfg, ls[k].fading);
    check_window(cfg, source, ls[k].fading, kSampleGuard);
    const RestrictedSimulator sim = make_simulator(cfg, source, ls[k].fading, cfg.tau);
    const auto reps = sim.simulate_batch(cfg.n_reps, derive_seed(cfg.seed, k));
    const MeanMeasure measure = tabulated_measure(sim, cfg.tau);
    const GoFReport g = goodness_of_fit(reps, measure, cfg.tau, gof_options(cfg, k));
    bounds.push_back(bounds_json(b, ls[k].sigma));
    gofs.push_back(gof_json(g, ls[k].sigma));
    summary.cell(sigma_cell(ls[k].sigma))
        .cell(b.report.upper)
        .cell(b.report.lower)
        .cell(g.dispersion_index)
        .cell(g.ks_p_value)
        .cell(g.count_tv);
    summary.end_row();
  }
  Artifacts out(cfg, "converge");
  out.write_json("tv_bounds.json", bounds);
  out.write_json("gof.json", gofs);
  out.write("summary.csv", summary.text());
  return out.paths();
}

// ---- diagnose ----

std::vector<std::string> run_diagnose(const ExperimentConfig& cfg) {
  require_spatial(cfg, "diagnose");
  if (cfg.data_path.empty()) throw ConfigError("data", "missing required field");
  const auto ls = laws(cfg);
  if (ls.size() != 1) throw ConfigError("fading.sigma_sweep", "diagnose takes a single fading law");
  const CsvTable table = read_csv(cfg.data_path);
  const auto cy = table.column("y", "data");
  const bool has_rep = table.has_column("rep");
  const std::size_t n = has_rep ? cfg.n_reps : 1;
  std::vector<std::vector<double>> values(n);
  for (const auto& row : table.rows) {
    std::size_t rep = 0;
    if (has_rep) {
      const double r = row[table.column("rep", "data")];
      if (!(r >= 0.0) || r != std::floor(r) || r >= static_cast<double>(n)) {
        throw ConfigError("data", "rep index " + format_double(r) + " outside [0, n_reps)");
      }
      rep = static_cast<std::size_t>(r);
    }
    if (!(row[cy] > 0.0)) throw ConfigError("data", "propagation values must be positive");
    if (row[cy] <= cfg.tau) values[rep].push_back(row[cy]);
  }
  std::vector<PropagationProcess> reps;
  for (auto& v : values) reps.emplace_back(std::move(v), cfg.tau, "data");

  const RadialSource source = make_source(cfg);
  const RestrictedSimulator sim = make_simulator(cfg, source, ls[0].fading, cfg.tau);
  const MeanMeasure measure = tabulated_measure(sim, cfg.tau);
  const GoFReport g = goodness_of_fit(reps, measure, cfg.tau, gof_options(cfg, 0));
  Artifacts out(cfg, "diagnose");
  out.write_json("gof.json", json::array({gof_json(g, ls[0].sigma)}));
  return out.paths();
}

// ---- ginibre-check ----

struct Moments {
  double mean = 0.0;
  double mean_se = 0.0;
  double variance = 0.0;
  double variance_se = 0.0;
};

Moments count_moments(const std::vector<double>& x) {
  const auto n = static_cast<double>(x.size());
  double m = 0.0;
  for (double v : x) m += v;
  m /= n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : x) {
    const double d = (v - m) * (v - m);
    m2 += d;
    m4 += d * d;
  }
  Moments out;
  out.mean = m;
  out.variance = m2 / (n - 1.0);
  out.mean_se = std::sqrt(out.variance / n);
  const double mu2 = m2 / n;
  const double mu4 = m4 / n;
  out.variance_se = std::sqrt(std::max(0.0, mu4 - mu2 * mu2) / n);
  return out;
}

std::vector<std::string> run_ginibre_check(const ExperimentConfig& cfg) {
  if (cfg.pattern.kind != PatternKind::ginibre) {
    throw ConfigError("pattern.kind", "ginibre-check needs a ginibre pattern");
  }
  if (cfg.n_reps < 2) throw ConfigError("n_reps", "ginibre-check needs at least two realizations");
  const GinibreParams& params = cfg.pattern.ginibre;
  const GinibreCheckSpec& spec = cfg.ginibre_check;
  const double r = spec.radius;
  const auto cutoff = ginibre_index_cutoff(params, r);
  const auto counts = parallel_map<double>(cfg.n_reps, [&](std::size_t i) {
    return static_cast<double>(sample_alpha_ginibre_radial(params, r, derive_seed(cfg.seed, i), cutoff).size());
  });
  const Moments m = count_moments(counts);
  const double area = kPi * r * r;
  const double expected = params.c * r * r;

  CsvWriter csv({"quantity", "u", "target", "estimate", "std_error", "relation", "pass"});
  auto row = [&](const std::string& q, const std::string& u, double target, double est, double se,
                 bool upper_only) {
    const bool pass = upper_only ? est <= target + 3.0 * se : std::abs(est - target) <= 3.0 * se;
    csv.cell(q).cell(u).cell(target).cell(est).cell(se).cell(std::string(upper_only ? "le" : "eq"));
    csv.cell(std::string(pass ? "true" : "false"));
    csv.end_row();
  };
  row("intensity", "", params.c / kPi, m.mean / area, m.mean_se / area, false);
  row("mean_count", "", expected, m.mean, m.mean_se, false);
  row("count_variance", "", expected, m.variance, m.variance_se, true);
  const auto pc = ginibre_pair_correlation(params, spec.window_radius, spec.u, spec.half_width,
                                           cfg.n_reps, derive_seed(cfg.seed, 0x9e11));
  for (const auto& p : pc) row("pair_correlation", format_double(p.u), p.target, p.estimate, p.std_error, false);

  Artifacts out(cfg, "ginibre-check");
  out.write("ginibre_check.csv", csv.text());
  return out.paths();
}

// ---- cox-compare ----

std::vector<std::string> run_cox_compare(const ExperimentConfig& cfg) {
  if (cfg.pattern.kind != PatternKind::cox_mixture) {
    throw ConfigError("pattern.kind", "cox-compare needs a cox_mixture pattern");
  }
  if (cfg.n_reps < 1000) throw ConfigError("n_reps", "cox-compare needs at least 1000 realizations");
  const auto& grid = cfg.cox_compare.r_grid;
  if (grid.empty()) throw ConfigError("cox_compare.r_grid", "must not be empty");
  const double radius = *std::max_element(grid.begin(), grid.end());
  const double l1 = cfg.pattern.lambda1;
  const double l2 = cfg.pattern.lambda2;
  const double mean_intensity = 0.5 * (l1 + l2);
  const GinibreParams gp{1.0, kPi * mean_intensity};
  const auto cutoff = ginibre_index_cutoff(gp, radius);
  const PointPattern2D lattice = make_lattice(LatticeKind::square, 1.0 / std::sqrt(mean_intensity), radius);

  const std::vector<std::pair<std::string, PatternSampler>> models = {
      {"poisson", [=](std::uint64_t s) { return sample_poisson(mean_intensity, radius, s); }},
      {"cox_mixture", [=](std::uint64_t s) { return sample_cox_mixture(l1, l2, radius, s); }},
      {"ginibre", [=](std::uint64_t s) { return sample_alpha_ginibre_radial(gp, radius, s, cutoff); }},
      {"lattice", [lattice](std::uint64_t) { return lattice; }},
  };
  CsvWriter csv({"model", "r", "mean", "variance", "ratio", "std_error"});
  for (std::size_t m = 0; m < models.size(); ++m) {
    const auto pts = variance_ratio(models[m].second, grid, cfg.n_reps, derive_seed(cfg.seed, m));
    for (const auto& p : pts) {
      csv.cell(models[m].first).cell(p.r).cell(p.mean).cell(p.variance).cell(p.ratio).cell(p.std_error);
      csv.end_row();
    }
  }
  Artifacts out(cfg, "cox-compare");
  out.write("cox_compare.csv", csv.text());
  return out.paths();
}

}  // namespace

const char* version() noexcept { return PROPSIM_VERSION; }

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = {"sample",   "mean-measure",  "tv-bound",   "converge",
                                                 "diagnose", "ginibre-check", "cox-compare"};
  return names;
}

double disk_set_covariance(double radius, double v) {
  if (!(radius > 0.0)) throw ParameterError("radius must be positive");
  if (v < 0.0) throw ParameterError("distance must be non-negative");
  if (v >= 2.0 * radius) return 0.0;
  return 2.0 * radius * radius * std::acos(v / (2.0 * radius)) -
         0.5 * v * std::sqrt(4.0 * radius * radius - v * v);
}

std::vector<PairCorrelationPoint> ginibre_pair_correlation(const GinibreParams& params,
                                                           double window_radius,
                                                           std::span<const double> u,
                                                           double half_width, std::size_t n_reps,
                                                           std::uint64_t seed) {
  params.validate();
  if (!(window_radius > 0.0) || !(half_width > 0.0)) {
    throw ParameterError("window radius and half width must be positive");
  }
  if (n_reps < 2) throw ParameterError("pair correlation needs at least two realizations");
  const std::size_t m = u.size();
  std::vector<double> lo(m), hi(m), norm(m), target(m);
  const double rho = params.c / kPi;
  for (std::size_t j = 0; j < m; ++j) {
    lo[j] = u[j] - half_width;
    hi[j] = u[j] + half_width;
    if (lo[j] < 0.0 || hi[j] > 2.0 * window_radius) {
      throw ParameterError("each ring must lie within [0, 2 window_radius]");
    }
    auto weight = [&](double v) { return 2.0 * kPi * v * disk_set_covariance(window_radius, v); };
    const double w = integrate(weight, lo[j], hi[j]);
    const double wg = integrate(
        [&](double v) { return weight(v) * -std::expm1(-params.c * v * v / params.alpha); }, lo[j], hi[j]);
    norm[j] = rho * rho * w;
    target[j] = wg / w;
  }
  const auto cutoff = ginibre_index_cutoff(params, window_radius);
  const auto rows = parallel_map<std::vector<double>>(n_reps, [&](std::size_t i) {
    const PointPattern2D pattern = sample_alpha_ginibre(params, window_radius, derive_seed(seed, i), cutoff);
    const auto pts = pattern.points();
    std::vector<double> pairs(m, 0.0);
    for (std::size_t a = 0; a < pts.size(); ++a) {
      for (std::size_t b = a + 1; b < pts.size(); ++b) {
        const double d = std::hypot(pts[a].x - pts[b].x, pts[a].y - pts[b].y);
        for (std::size_t j = 0; j < m; ++j) {
          if (d >= lo[j] && d <= hi[j]) pairs[j] += 2.0;
        }
      }
    }
    for (std::size_t j = 0; j < m; ++j) pairs[j] /= norm[j];
    return pairs;
  });
  std::vector<PairCorrelationPoint> out;
  for (std::size_t j = 0; j < m; ++j) {
    RunningStats stats;
    for (const auto& row : rows) stats.push(row[j]);
    out.push_back({u[j], stats.mean(), stats.std_error(), target[j]});
  }
  return out;
}

RadialSource make_source(const ExperimentConfig& cfg) {
  const PatternSpec& p = cfg.pattern;
  const double r_max = cfg.r_max.value_or(kInf);
  switch (p.kind) {
    case PatternKind::lattice:
      if (cfg.r_max) return FiniteSource{make_lattice(p.lattice, p.edge_length, *cfg.r_max)};
      return LatticeSource{p.lattice, p.edge_length};
    case PatternKind::poisson:
      return PoissonSource{p.intensity, r_max};
    case PatternKind::cox_mixture:
      return CoxMixtureSource{p.lambda1, p.lambda2, r_max};
    case PatternKind::ginibre:
      if (!cfg.r_max) throw ConfigError("r_max", "missing required field (ginibre patterns live on a disk)");
      return GinibreSource{p.ginibre, *cfg.r_max};
    case PatternKind::csv:
      return FiniteSource{read_pattern(cfg)};
    case PatternKind::probabilities:
      break;
  }
  throw ConfigError("pattern.kind", "probabilities do not describe a spatial source");
}

std::vector<std::string> run_experiment(const std::string& subcommand,
                                        const ExperimentConfig& config) {
  if (subcommand == "sample") return run_sample(config);
  if (subcommand == "mean-measure") return run_mean_measure(config);
  if (subcommand == "tv-bound") return run_tv_bound(config);
  if (subcommand == "converge") return run_converge(config);
  if (subcommand == "diagnose") return run_diagnose(config);
  if (subcommand == "ginibre-check") return run_ginibre_check(config);
  if (subcommand == "cox-compare") return run_cox_compare(config);
  throw ConfigError("<subcommand>", "unknown subcommand '" + subcommand + "'");
}

int run_cli(const std::string& subcommand, const std::string& config_path,
            const Overrides& overrides, std::ostream& out, std::ostream& err) {
  try {
    const ExperimentConfig cfg = load_config(config_path, overrides);
    for (const auto& path : run_experiment(subcommand, cfg)) out << path << '\n';
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const TruncationRiskError& e) {
    err << "error: " << e.what() << "; rerun with r_max >= " << format_double(e.suggested_r_max())
        << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace propsim
