#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "propsim/fading.hpp"
#include "propsim/geometry.hpp"
#include "propsim/path_loss.hpp"
#include "propsim/poisson_approx.hpp"

namespace propsim {

enum class PatternKind { lattice, poisson, ginibre, cox_mixture, csv, probabilities };

const char* to_string(PatternKind kind) noexcept;

struct PatternSpec {
  PatternKind kind = PatternKind::lattice;
  LatticeKind lattice = LatticeKind::square;
  double edge_length = 1.0;
  double intensity = 1.0;  // poisson
  double lambda1 = 1.0;    // cox_mixture
  double lambda2 = 1.0;
  GinibreParams ginibre;
  std::string path;                  // csv: columns x,y or r
  std::vector<double> probabilities; // probabilities: p_i(tau) per point
  // Whether points beyond r_max exist. Defaults to complete for csv
  // patterns and truncated for generated ones.
  Window window = Window::truncated;
};

struct GinibreCheckSpec {
  double radius = 3.0;         // disk for the count moments
  double window_radius = 6.0;  // disk for the pair correlation
  std::vector<double> u{0.2, 0.5, 1.0};
  double half_width = 0.05;
};

struct CoxCompareSpec {
  std::vector<double> r_grid{2.0, 5.0, 10.0, 20.0};
};

struct ExperimentConfig {
  PatternSpec pattern;
  PathLoss path_loss = PathLoss::power_law(1.0, 4.0);
  Fading fading = Fading::deterministic(1.0);
  std::vector<double> sigma_sweep;  // empty: the fading as given
  double tau = 1.0;
  std::optional<double> r_max;
  std::size_t n_reps = 1000;
  std::uint64_t seed = 0;
  std::string output_dir = ".";
  std::vector<double> t_grid;
  std::size_t mc_samples = 100000;
  double level = 0.01;
  std::size_t null_sims = 1000;
  std::string data_path;  // diagnose: CSV with columns rep,y
  GinibreCheckSpec ginibre_check;
  CoxCompareSpec cox_compare;

  // Canonical JSON of the effective configuration without output_dir and
  // its FNV-1a hash.
  std::string canonical_json;
  std::uint64_t hash = 0;
};

// Dotted path and raw value, e.g. {"fading.sigma", "4"}. Values that parse
// as JSON are used as such, anything else as a string.
using Overrides = std::vector<std::pair<std::string, std::string>>;

// Throws ConfigError with the dotted path of the offending field. Relative
// file paths are resolved against base_dir.
ExperimentConfig parse_config(const std::string& json_text, const Overrides& overrides = {},
                              const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path, const Overrides& overrides = {});

}  // namespace propsim
