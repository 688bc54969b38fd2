#include "propsim/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "propsim/error.hpp"
#include "propsim/io.hpp"

namespace propsim {

using json = nlohmann::json;

const char* to_string(PatternKind kind) noexcept {
  switch (kind) {
    case PatternKind::lattice:
      return "lattice";
    case PatternKind::poisson:
      return "poisson";
    case PatternKind::ginibre:
      return "ginibre";
    case PatternKind::cox_mixture:
      return "cox_mixture";
    case PatternKind::csv:
      return "csv";
    case PatternKind::probabilities:
      return "probabilities";
  }
  return "unknown";
}

namespace {

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(child(path, key), "unknown field");
  }
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) throw ConfigError(child(path, key), "missing required field");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "expected a finite number");
  return x;
}

double number(const json& obj, const std::string& key, const std::string& path) {
  return as_number(require(obj, key, path), child(path, key));
}

double number_or(const json& obj, const std::string& key, const std::string& path, double fallback) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  return as_number(*it, child(path, key));
}

double positive(double x, const std::string& path) {
  if (!(x > 0.0)) throw ConfigError(path, "must be positive");
  return x;
}

std::size_t count_or(const json& obj, const std::string& key, const std::string& path,
                     std::size_t fallback) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_number_unsigned() || it->get<std::uint64_t>() == 0) {
    throw ConfigError(child(path, key), "expected a positive integer");
  }
  return static_cast<std::size_t>(it->get<std::uint64_t>());
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::string text(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) throw ConfigError(child(path, key), "expected a string");
  return v.get<std::string>();
}

template <class F>
auto wrap(const std::string& path, F&& make) {
  try {
    return make();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

std::string resolve(const std::string& file, const std::string& base_dir) {
  const std::filesystem::path p(file);
  if (p.is_absolute()) return file;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

PathLoss parse_path_loss(const json& j, const std::string& path) {
  const std::string kind = text(j, "kind", path);
  if (kind == "power_law") {
    check_keys(j, path, {"kind", "K", "beta"});
    const double K = number_or(j, "K", path, 1.0);
    const double beta = number(j, "beta", path);
    return wrap(path, [&] { return PathLoss::power_law(K, beta); });
  }
  if (kind == "exp_power") {
    check_keys(j, path, {"kind", "alpha", "beta"});
    const double alpha = number(j, "alpha", path);
    const double beta = number(j, "beta", path);
    return wrap(path, [&] { return PathLoss::exp_power(alpha, beta); });
  }
  if (kind == "multi_slope") {
    check_keys(j, path, {"kind", "breakpoints", "exponents", "b1"});
    auto breaks = numbers(require(j, "breakpoints", path), child(path, "breakpoints"));
    auto exps = numbers(require(j, "exponents", path), child(path, "exponents"));
    const double b1 = number_or(j, "b1", path, 1.0);
    return wrap(path, [&] { return PathLoss::multi_slope(breaks, exps, b1); });
  }
  if (kind == "tabulated") {
    check_keys(j, path, {"kind", "knots", "values"});
    auto knots = numbers(require(j, "knots", path), child(path, "knots"));
    auto values = numbers(require(j, "values", path), child(path, "values"));
    return wrap(path, [&] { return PathLoss::tabulated(knots, values); });
  }
  throw ConfigError(child(path, "kind"), "unknown path-loss kind '" + kind + "'");
}

std::optional<double> default_beta(const PathLoss& pl) {
  if (const auto* p = pl.as_power_law()) return p->beta;
  if (const auto* e = pl.as_exp_power()) return e->beta;
  return std::nullopt;
}

Fading parse_fading(const json& j, const std::string& path, std::optional<double> beta_default,
                    bool top_level) {
  const std::string kind = text(j, "kind", path);
  std::set<std::string> extra;
  if (top_level) extra.insert("sigma_sweep");
  auto keys = [&](std::set<std::string> k) {
    k.insert(extra.begin(), extra.end());
    check_keys(j, path, k);
  };
  auto beta = [&]() {
    if (j.contains("beta")) return positive(number(j, "beta", path), child(path, "beta"));
    if (beta_default) return *beta_default;
    throw ConfigError(child(path, "beta"), "missing required field (no path-loss exponent to default to)");
  };
  if (kind == "lognormal" || kind == "suzuki") {
    keys({"kind", "sigma", "beta"});
    const double sigma = number_or(j, "sigma", path, 0.0);
    const double b = beta();
    return wrap(path, [&] {
      return kind == "lognormal" ? Fading::lognormal(sigma, b) : Fading::suzuki(sigma, b);
    });
  }
  if (kind == "exponential") {
    keys({"kind", "rate"});
    const double rate = number_or(j, "rate", path, 1.0);
    return wrap(path, [&] { return Fading::exponential(rate); });
  }
  if (kind == "deterministic") {
    keys({"kind", "value"});
    const double value = number_or(j, "value", path, 1.0);
    return wrap(path, [&] { return Fading::deterministic(value); });
  }
  if (kind == "product") {
    keys({"kind", "factors"});
    const json& factors = require(j, "factors", path);
    if (!factors.is_array() || factors.empty()) {
      throw ConfigError(child(path, "factors"), "expected a non-empty array");
    }
    std::vector<Fading> parts;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      parts.push_back(parse_fading(factors[i], child(path, "factors") + "[" + std::to_string(i) + "]",
                                   beta_default, false));
    }
    return wrap(path, [&] { return Fading::product(parts); });
  }
  if (kind == "shared_factor") {
    keys({"kind", "idiosyncratic", "common"});
    Fading idio = parse_fading(require(j, "idiosyncratic", path), child(path, "idiosyncratic"),
                               beta_default, false);
    Fading common = parse_fading(require(j, "common", path), child(path, "common"), beta_default, false);
    return wrap(path, [&] { return Fading::shared_factor(idio, common); });
  }
  throw ConfigError(child(path, "kind"), "unknown fading kind '" + kind + "'");
}

PatternSpec parse_pattern(const json& j, const std::string& path, const std::string& base_dir) {
  PatternSpec spec;
  const std::string kind = text(j, "kind", path);
  spec.window = kind == "csv" ? Window::complete : Window::truncated;
  if (j.contains("window")) {
    const std::string window = text(j, "window", path);
    if (window == "complete") {
      spec.window = Window::complete;
    } else if (window == "truncated") {
      spec.window = Window::truncated;
    } else {
      throw ConfigError(child(path, "window"), "expected 'complete' or 'truncated'");
    }
  }
  if (kind == "lattice") {
    check_keys(j, path, {"kind", "lattice", "edge_length", "window"});
    spec.kind = PatternKind::lattice;
    if (j.contains("lattice")) {
      const std::string name = text(j, "lattice", path);
      spec.lattice = wrap(child(path, "lattice"), [&] { return lattice_kind_from_string(name); });
    }
    spec.edge_length = positive(number_or(j, "edge_length", path, 1.0), child(path, "edge_length"));
  } else if (kind == "poisson") {
    check_keys(j, path, {"kind", "intensity", "window"});
    spec.kind = PatternKind::poisson;
    spec.intensity = positive(number_or(j, "intensity", path, 1.0), child(path, "intensity"));
  } else if (kind == "ginibre") {
    check_keys(j, path, {"kind", "alpha", "c", "window"});
    spec.kind = PatternKind::ginibre;
    spec.ginibre.alpha = number_or(j, "alpha", path, 1.0);
    spec.ginibre.c = number_or(j, "c", path, 1.0);
    wrap(path, [&] {
      spec.ginibre.validate();
      return 0;
    });
  } else if (kind == "cox_mixture") {
    check_keys(j, path, {"kind", "lambda1", "lambda2", "window"});
    spec.kind = PatternKind::cox_mixture;
    spec.lambda1 = positive(number(j, "lambda1", path), child(path, "lambda1"));
    spec.lambda2 = positive(number(j, "lambda2", path), child(path, "lambda2"));
  } else if (kind == "csv") {
    check_keys(j, path, {"kind", "path", "window"});
    spec.kind = PatternKind::csv;
    spec.path = resolve(text(j, "path", path), base_dir);
  } else if (kind == "probabilities") {
    check_keys(j, path, {"kind", "values", "window"});
    spec.kind = PatternKind::probabilities;
    spec.probabilities = numbers(require(j, "values", path), child(path, "values"));
    for (std::size_t i = 0; i < spec.probabilities.size(); ++i) {
      const double p = spec.probabilities[i];
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ConfigError(child(path, "values") + "[" + std::to_string(i) + "]", "must lie in [0, 1]");
      }
    }
  } else {
    throw ConfigError(child(path, "kind"), "unknown pattern kind '" + kind + "'");
  }
  return spec;
}

std::uint64_t parse_seed(const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    try {
      std::size_t used = 0;
      const auto x = std::stoull(s, &used, 0);
      if (used == s.size() && !s.empty() && s[0] != '-') return x;
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("seed", "expected an unsigned 64-bit integer");
}

void set_dotted(json& root, const std::string& dotted, const std::string& raw) {
  if (dotted.empty()) throw ConfigError("<override>", "empty field path");
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError(dotted, "malformed field path");
    if (node->is_null()) *node = json::object();
    if (node->is_array()) {
      std::size_t index = 0;
      try {
        index = std::stoul(key);
      } catch (const std::exception&) {
        throw ConfigError(dotted, "expected an array index");
      }
      if (index >= node->size()) throw ConfigError(dotted, "array index out of range");
      node = &(*node)[index];
    } else if (node->is_object()) {
      node = &(*node)[key];
    } else {
      throw ConfigError(dotted, "cannot descend into a scalar");
    }
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = std::move(value);
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, const Overrides& overrides,
                              const std::string& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("<root>", "expected an object");
  for (const auto& [key, value] : overrides) set_dotted(root, key, value);

  check_keys(root, "", {"pattern", "path_loss", "fading", "tau", "r_max", "n_reps", "seed",
                        "output_dir", "t_grid", "mc_samples", "diagnostics", "data",
                        "ginibre_check", "cox_compare"});

  ExperimentConfig cfg;
  cfg.path_loss = parse_path_loss(require(root, "path_loss", ""), "path_loss");
  cfg.pattern = parse_pattern(require(root, "pattern", ""), "pattern", base_dir);
  const json& fading = require(root, "fading", "");
  cfg.fading = parse_fading(fading, "fading", default_beta(cfg.path_loss), true);
  if (fading.contains("sigma_sweep")) {
    cfg.sigma_sweep = numbers(fading["sigma_sweep"], "fading.sigma_sweep");
    for (std::size_t i = 0; i < cfg.sigma_sweep.size(); ++i) {
      if (cfg.sigma_sweep[i] < 0.0) {
        throw ConfigError("fading.sigma_sweep[" + std::to_string(i) + "]", "must be non-negative");
      }
    }
  }

  cfg.tau = positive(number(root, "tau", ""), "tau");
  if (root.contains("r_max") && !root["r_max"].is_null()) {
    cfg.r_max = positive(number(root, "r_max", ""), "r_max");
  }
  cfg.n_reps = count_or(root, "n_reps", "", cfg.n_reps);
  cfg.seed = root.contains("seed") ? parse_seed(root["seed"]) : 0;
  if (root.contains("output_dir")) cfg.output_dir = text(root, "output_dir", "");
  if (root.contains("t_grid")) {
    cfg.t_grid = numbers(root["t_grid"], "t_grid");
    for (std::size_t i = 0; i < cfg.t_grid.size(); ++i) positive(cfg.t_grid[i], "t_grid[" + std::to_string(i) + "]");
  }
  cfg.mc_samples = count_or(root, "mc_samples", "", cfg.mc_samples);
  if (root.contains("diagnostics")) {
    const json& d = root["diagnostics"];
    check_keys(d, "diagnostics", {"level", "null_sims"});
    cfg.level = number_or(d, "level", "diagnostics", cfg.level);
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw ConfigError("diagnostics.level", "must lie in (0, 1)");
    cfg.null_sims = count_or(d, "null_sims", "diagnostics", cfg.null_sims);
  }
  if (root.contains("data")) cfg.data_path = resolve(text(root, "data", ""), base_dir);
  if (root.contains("ginibre_check")) {
    const json& g = root["ginibre_check"];
    const std::string p = "ginibre_check";
    check_keys(g, p, {"radius", "window_radius", "u", "half_width"});
    auto& spec = cfg.ginibre_check;
    spec.radius = positive(number_or(g, "radius", p, spec.radius), p + ".radius");
    spec.window_radius = positive(number_or(g, "window_radius", p, spec.window_radius), p + ".window_radius");
    spec.half_width = positive(number_or(g, "half_width", p, spec.half_width), p + ".half_width");
    if (g.contains("u")) spec.u = numbers(g["u"], p + ".u");
  }
  if (root.contains("cox_compare")) {
    const json& c = root["cox_compare"];
    check_keys(c, "cox_compare", {"r_grid"});
    if (c.contains("r_grid")) cfg.cox_compare.r_grid = numbers(c["r_grid"], "cox_compare.r_grid");
  }

  json canonical = root;
  canonical.erase("output_dir");
  cfg.canonical_json = canonical.dump();
  cfg.hash = fnv1a64(cfg.canonical_json);
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<config>", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(ss.str(), overrides, dir.empty() ? "." : dir.string());
}

}  // namespace propsim
