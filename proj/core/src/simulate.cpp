#include "propsim/simulate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/special_functions/gamma.hpp>

#include "propsim/error.hpp"
#include "propsim/numeric.hpp"
#include "propsim/parallel.hpp"

namespace propsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// Far-field shells R_0 < R_1 < ... < R_K.
struct Annuli {
  std::vector<double> radius;
  std::vector<double> radius_sq;
  std::vector<double> gain;  // h(R_k)

  std::size_t size() const noexcept { return radius.empty() ? 0 : radius.size() - 1; }
};

struct FinitePlan {
  std::vector<double> radii;
  std::vector<double> gains;
};

struct LatticePlan {
  LatticeGeometry geometry;
  double coefficient = 0.0;  // D(r) = coefficient r^2
  FinitePlan direct;
  Annuli annuli;
  std::vector<std::int64_t> counts;  // points in annulus k (1-based in radius)
  std::vector<std::int64_t> prefix;  // points with R_0 < |x| <= R_k
  std::vector<std::int64_t> box_i;
  std::vector<std::int64_t> box_j;
};

// Indices of the radial Ginibre construction. Below `direct_end` every index
// is drawn; beyond it, blocks of indices are thinned against the envelope
// P(G <= g) + P(S >= h(sqrt g) / tau), which covers every index of the block.
struct GinibrePlan {
  double alpha = 1.0;
  double kappa = 1.0;  // c / alpha
  double radius_sq = 0.0;
  std::int64_t cutoff = 0;  // indices 0 .. cutoff-1
  std::int64_t direct_end = 0;
  struct Block {
    std::int64_t begin = 0;
    std::int64_t end = 0;
    double g = 0.0;      // squared modulus threshold
    double gain = 0.0;   // h(sqrt g)
    double p_low = 0.0;  // P(G_begin <= g)
  };
  std::vector<Block> blocks;
};

struct PoissonPlan {
  double intensity = 0.0;
  Annuli annuli;  // radius[0] is the inner disk where every point is a candidate
};

std::size_t geometric_skip(double q, Rng& rng) {
  if (q >= 1.0) return 0;
  const double g = std::floor(std::log(uniform_open0(rng)) / std::log1p(-q));
  if (!(g < 9e18)) return std::numeric_limits<std::size_t>::max() / 2;
  return static_cast<std::size_t>(g);
}

// p(r) at threshold t under `law`, with p = 1 when h(r)/t underflows.
double reach(const Fading& law, double gain, double t) {
  const double s = gain / t;
  return s > 0.0 ? law.tail(s) : 1.0;
}

// E of coefficient * (max(h^-1(tau S), R)^2 - R^2): expected number of
// transmitters beyond R that reach (0, tau], for D(r) = coefficient r^2.
double expected_beyond(const PathLoss& pl, const Fading& marginal, double coefficient,
                       double tau, double R) {
  const double kink = pl.evaluate(R) / tau;
  const double kinks[] = {kink};
  return marginal.expect(
      [&](double s) {
        const double rho = pl.inverse(tau * s);
        if (rho <= R) return 0.0;
        if (std::isinf(rho)) return kInf;
        return coefficient * (rho * rho - R * R);
      },
      kinks);
}

Annuli build_annuli(double inner, double coefficient, const PathLoss& pl, const Fading& marginal,
                    double tau, const SimulatorOptions& options) {
  Annuli a;
  a.radius.push_back(inner);
  for (;;) {
    const double R = a.radius.back();
    const double beyond = expected_beyond(pl, marginal, coefficient, tau, R);
    if (beyond < options.far_tolerance) break;
    if (a.radius.size() > 4000 || std::isinf(R * options.annulus_ratio)) {
      throw TruncationRiskError("far-field transmitters never become negligible", kInf);
    }
    a.radius.push_back(R * options.annulus_ratio);
  }
  for (double R : a.radius) {
    a.radius_sq.push_back(R * R);
    a.gain.push_back(pl.evaluate(R));
  }
  return a;
}

// Thinning over points sorted by radius, with the envelope refreshed at the
// start of every block of radii within a factor `ratio`.
void simulate_sorted(const FinitePlan& plan, const FadingRealization& fr, double tau, double ratio,
                     Rng& rng, std::vector<double>& out) {
  const std::size_t n = plan.radii.size();
  if (!fr.has_conditional_sampler()) {
    for (std::size_t i = 0; i < n; ++i) {
      const double y = plan.gains[i] / fr.sample(rng);
      if (y <= tau) out.push_back(y);
    }
    return;
  }
  std::size_t i = 0;
  while (i < n) {
    const double u = plan.gains[i] / tau;
    const double q = u > 0.0 ? fr.tail(u) : 1.0;
    if (!(q > 0.0)) break;
    const auto limit = std::upper_bound(plan.radii.begin() + static_cast<std::ptrdiff_t>(i),
                                        plan.radii.end(), plan.radii[i] * ratio);
    const std::size_t end = std::max(i + 1, static_cast<std::size_t>(limit - plan.radii.begin()));
    std::size_t j = i;
    for (;;) {
      const std::size_t skip = geometric_skip(q, rng);
      if (skip >= end - j) break;
      j += skip;
      const double s = fr.sample_conditional(u, rng);
      if (s >= plan.gains[j] / tau) out.push_back(std::min(plan.gains[j] / s, tau));
      ++j;
      if (j >= end) break;
    }
    i = end;
  }
}

GinibrePlan plan_ginibre(const GinibreParams& params, double r_max, std::int64_t cutoff,
                         const PathLoss& pl) {
  GinibrePlan p;
  p.alpha = params.alpha;
  p.kappa = params.c / params.alpha;
  p.radius_sq = r_max * r_max;
  p.cutoff = cutoff;
  p.direct_end = std::min<std::int64_t>(cutoff, 256);
  for (std::int64_t a = p.direct_end; a < cutoff;) {
    const std::int64_t b =
        std::min(cutoff, std::max(a + 16, static_cast<std::int64_t>(std::ceil(1.05 * a))));
    const double shape = static_cast<double>(a + 1);
    GinibrePlan::Block blk;
    blk.begin = a;
    blk.end = b;
    blk.g = std::min((shape - 6.0 * std::sqrt(shape)) / p.kappa, p.radius_sq);
    blk.gain = pl.evaluate(std::sqrt(blk.g));
    blk.p_low = boost::math::gamma_p(shape, p.kappa * blk.g);
    p.blocks.push_back(blk);
    a = b;
  }
  return p;
}

// Index k carries a point with probability alpha, squared modulus
// Gamma(k + 1, 1 / kappa). Points outside the window are dropped.
void simulate_ginibre(const GinibrePlan& plan, const PathLoss& pl, const FadingRealization& fr,
                      double tau, Rng& rng, std::vector<double>& out) {
  auto emit = [&](double g, double s) {
    if (g > plan.radius_sq || !(g > 0.0)) return;
    const double y = pl.evaluate(std::sqrt(g)) / s;
    if (y <= tau) out.push_back(y);
  };
  const bool conditional = fr.has_conditional_sampler();
  const std::int64_t direct_end = conditional ? plan.direct_end : plan.cutoff;
  for (std::int64_t k = 0; k < direct_end; ++k) {
    if (uniform01(rng) >= plan.alpha) continue;
    std::gamma_distribution<double> gamma(static_cast<double>(k + 1), 1.0 / plan.kappa);
    const double g = gamma(rng);
    if (g > plan.radius_sq || !(g > 0.0)) continue;
    if (!conditional) {
      emit(g, fr.sample(rng));
      continue;
    }
    const double u = pl.evaluate(std::sqrt(g)) / tau;
    const double q = u > 0.0 ? fr.tail(u) : 1.0;
    if (uniform01(rng) < q) out.push_back(std::min(pl.evaluate(std::sqrt(g)) / fr.sample_conditional(u, rng), tau));
  }
  if (!conditional) return;
  for (const auto& blk : plan.blocks) {
    const double u = blk.gain / tau;
    const double p_high = u > 0.0 ? fr.tail(u) : 1.0;
    const double bound = plan.alpha * (blk.p_low + p_high - blk.p_low * p_high);
    if (!(bound > 0.0)) continue;
    auto k = blk.begin;
    for (;;) {
      const std::size_t skip = geometric_skip(bound, rng);
      if (skip >= static_cast<std::size_t>(blk.end - k)) break;
      k += static_cast<std::int64_t>(skip);
      const double shape = static_cast<double>(k + 1);
      const double p_low = boost::math::gamma_p(shape, plan.kappa * blk.g);
      const double cover = p_low + p_high - p_low * p_high;
      if (uniform01(rng) * bound < plan.alpha * cover) {
        // (G, S) from the product law restricted to {G <= g} or {S >= h(sqrt g) / tau}.
        if (uniform01(rng) * cover < p_low) {
          const double g = boost::math::gamma_p_inv(shape, uniform_open0(rng) * p_low) / plan.kappa;
          emit(g, fr.sample(rng));
        } else {
          const double g =
              boost::math::gamma_q_inv(shape, uniform_open0(rng) * (1.0 - p_low)) / plan.kappa;
          emit(g, fr.sample_conditional(u, rng));
        }
      }
      if (++k >= blk.end) break;
    }
  }
}

FinitePlan plan_from_pattern(const PointPattern2D& pattern, const PathLoss& pl) {
  FinitePlan plan;
  plan.radii.assign(pattern.radii().begin(), pattern.radii().end());
  plan.gains.reserve(plan.radii.size());
  for (double r : plan.radii) plan.gains.push_back(pl.evaluate(r));
  return plan;
}

// Inner radius at which the single-point reach probability drops below p.
double radius_at_probability(const PathLoss& pl, const Fading& marginal, double tau, double p) {
  return suggest_r_max(pl, marginal, tau, p);
}

}  // namespace

std::string source_name(const RadialSource& source) {
  return std::visit(overloaded{
                        [](const FiniteSource& s) { return "finite/" + s.pattern.provenance().kind; },
                        [](const LatticeSource& s) { return std::string("lattice/") + to_string(s.kind); },
                        [](const PoissonSource&) { return std::string("poisson"); },
                        [](const CoxMixtureSource&) { return std::string("cox_mixture"); },
                        [](const GinibreSource&) { return std::string("ginibre"); },
                    },
                    source);
}

bool source_is_random(const RadialSource& source) {
  return !std::holds_alternative<FiniteSource>(source) &&
         !std::holds_alternative<LatticeSource>(source);
}

struct RestrictedSimulator::Impl {
  RadialSource source;
  PathLoss path_loss;
  Fading fading;
  double tau;
  SimulatorOptions options;

  std::shared_ptr<const Fading> law;     // per-point law after the common factor
  std::shared_ptr<const Fading> common;  // null unless shared_factor

  FinitePlan finite;
  LatticePlan lattice;
  PoissonPlan poisson[2];
  GinibrePlan ginibre;

  Impl(RadialSource src, PathLoss pl, Fading fd, double t, SimulatorOptions opt)
      : source(std::move(src)), path_loss(std::move(pl)), fading(std::move(fd)), tau(t),
        options(opt) {
    if (!(tau > 0.0) || std::isinf(tau)) throw ParameterError("tau must be positive and finite");
    if (!(options.annulus_ratio > 1.0)) throw ParameterError("annulus ratio must exceed 1");
    if (const SharedFactor* sf = fading.as_shared_factor()) {
      law = sf->idiosyncratic;
      common = sf->common;
    } else {
      law = std::make_shared<const Fading>(fading);
    }

    std::visit(overloaded{
                   [&](const FiniteSource& s) { finite = plan_from_pattern(s.pattern, path_loss); },
                   [&](const LatticeSource& s) { plan_lattice(s); },
                   [&](const PoissonSource& s) {
                     if (std::isinf(s.r_max)) plan_poisson(poisson[0], s.intensity);
                     else check_positive(s.intensity, s.r_max);
                   },
                   [&](const CoxMixtureSource& s) {
                     if (std::isinf(s.r_max)) {
                       plan_poisson(poisson[0], s.lambda1);
                       plan_poisson(poisson[1], s.lambda2);
                     } else {
                       check_positive(s.lambda1, s.r_max);
                       check_positive(s.lambda2, s.r_max);
                     }
                   },
                   [&](const GinibreSource& s) {
                     ginibre = plan_ginibre(s.params, s.r_max,
                                            ginibre_index_cutoff(s.params, s.r_max), path_loss);
                   },
               },
               source);
  }

  static void check_positive(double intensity, double r_max) {
    if (!(intensity > 0.0) || !(r_max > 0.0)) {
      throw ParameterError("intensity and r_max must be positive");
    }
  }

  void require_conditional() const {
    if (!law->has_conditional_sampler()) {
      throw UnsupportedError(
          "infinite transmitter sets need a fading law with a conditional sampler; "
          "use a finite window (r_max) instead");
    }
  }

  void plan_poisson(PoissonPlan& plan, double intensity) {
    if (!(intensity > 0.0)) throw ParameterError("intensity must be positive");
    require_conditional();
    plan.intensity = intensity;
    double inner = radius_at_probability(path_loss, fading, tau, 0.5);
    if (std::isinf(inner)) throw TruncationRiskError("reach probability never decays", kInf);
    plan.annuli = build_annuli(inner, intensity * kPi, path_loss, fading, tau, options);
  }

  void plan_lattice(const LatticeSource& s) {
    require_conditional();
    LatticePlan& p = lattice;
    p.geometry = lattice_geometry(s.kind, s.edge_length);
    p.coefficient = GrowthFunction::lattice(s.kind, s.edge_length).coefficient();
    double direct = options.direct_radius_factor * s.edge_length;
    const double dense = radius_at_probability(path_loss, fading, tau, 0.05);
    if (std::isinf(dense) || dense > 1000.0 * s.edge_length) {
      throw UnsupportedError("reach probability stays above 0.05 beyond 1000 edge lengths");
    }
    direct = std::max(direct, dense);
    p.direct = plan_from_pattern(make_lattice(s.kind, s.edge_length, direct), path_loss);
    p.annuli = build_annuli(direct, p.coefficient, path_loss, fading, tau, options);

    double max_bx = 0.0;
    double max_by = 0.0;
    for (const auto& b : p.geometry.basis) {
      max_bx = std::max(max_bx, std::abs(b.x));
      max_by = std::max(max_by, std::abs(b.y));
    }
    std::int64_t previous = p.geometry.count_in_disk(p.annuli.radius_sq[0]);
    p.prefix.push_back(0);
    for (std::size_t k = 1; k < p.annuli.radius.size(); ++k) {
      const std::int64_t total = p.geometry.count_in_disk(p.annuli.radius_sq[k]);
      p.counts.push_back(total - previous);
      p.prefix.push_back(p.prefix.back() + (total - previous));
      previous = total;
      const double R = p.annuli.radius[k];
      const auto J = static_cast<std::int64_t>(std::ceil((R + max_by) / p.geometry.a2.y)) + 1;
      const auto I = static_cast<std::int64_t>(std::ceil(
                         (R + static_cast<double>(J) * std::abs(p.geometry.a2.x) + max_bx) /
                         p.geometry.a1.x)) +
                     1;
      p.box_i.push_back(I);
      p.box_j.push_back(J);
    }
  }

  // ---- simulation ------------------------------------------------------

  void simulate_lattice(const FadingRealization& fr, Rng& rng, std::vector<double>& out) const {
    const LatticePlan& p = lattice;
    simulate_sorted(p.direct, fr, tau, options.annulus_ratio, rng, out);
    const std::size_t nb = p.geometry.basis.size();
    std::vector<std::array<std::int64_t, 3>> chosen;
    for (std::size_t k = 1; k <= p.annuli.size(); ++k) {
      const double u = p.annuli.gain[k - 1] / tau;
      const double q = fr.tail(u);
      if (!(q > 0.0)) break;
      const std::int64_t n = p.counts[k - 1];
      const double lo_sq = p.annuli.radius_sq[k - 1];
      const double hi_sq = p.annuli.radius_sq[k];
      const std::int64_t I = p.box_i[k - 1];
      const std::int64_t J = p.box_j[k - 1];
      auto in_shell = [&](const Point2& v) {
        const double d2 = v.x * v.x + v.y * v.y;
        return d2 > lo_sq && d2 <= hi_sq;
      };
      auto keep = [&](const Point2& v, double s) {
        const double g = path_loss.evaluate(std::sqrt(v.x * v.x + v.y * v.y));
        if (s >= g / tau) out.push_back(std::min(g / s, tau));
      };
      if (q > 0.25) {
        for (std::int64_t j = -J; j <= J; ++j) {
          for (std::int64_t i = -I; i <= I; ++i) {
            for (std::size_t b = 0; b < nb; ++b) {
              const Point2 v = p.geometry.vertex(i, j, b);
              if (in_shell(v)) keep(v, fr.sample(rng));
            }
          }
        }
        continue;
      }
      std::binomial_distribution<std::int64_t> binomial(n, q);
      const std::int64_t c = binomial(rng);
      if (c == 0) continue;
      chosen.clear();
      std::uniform_int_distribution<std::int64_t> pick_i(-I, I);
      std::uniform_int_distribution<std::int64_t> pick_j(-J, J);
      std::uniform_int_distribution<std::size_t> pick_b(0, nb - 1);
      while (static_cast<std::int64_t>(chosen.size()) < c) {
        const std::array<std::int64_t, 3> idx{pick_i(rng), pick_j(rng),
                                              static_cast<std::int64_t>(pick_b(rng))};
        const Point2 v = p.geometry.vertex(idx[0], idx[1], static_cast<std::size_t>(idx[2]));
        if (!in_shell(v)) continue;
        if (std::find(chosen.begin(), chosen.end(), idx) != chosen.end()) continue;
        chosen.push_back(idx);
        keep(v, fr.sample_conditional(u, rng));
      }
    }
  }

  void simulate_poisson(const PoissonPlan& p, const FadingRealization& fr, Rng& rng,
                        std::vector<double>& out) const {
    const double inner_sq = p.annuli.radius_sq[0];
    {
      std::poisson_distribution<std::int64_t> count(p.intensity * kPi * inner_sq);
      const std::int64_t c = count(rng);
      for (std::int64_t m = 0; m < c; ++m) {
        const double r = p.annuli.radius[0] * std::sqrt(uniform_open0(rng));
        const double g = path_loss.evaluate(r);
        const double s = fr.sample(rng);
        if (s >= g / tau) out.push_back(std::min(g / s, tau));
      }
    }
    for (std::size_t k = 1; k <= p.annuli.size(); ++k) {
      const double u = p.annuli.gain[k - 1] / tau;
      const double q = fr.tail(u);
      if (!(q > 0.0)) break;
      const double lo_sq = p.annuli.radius_sq[k - 1];
      const double width = p.annuli.radius_sq[k] - lo_sq;
      std::poisson_distribution<std::int64_t> count(p.intensity * kPi * width * q);
      const std::int64_t c = count(rng);
      for (std::int64_t m = 0; m < c; ++m) {
        const double r = std::sqrt(lo_sq + uniform01(rng) * width);
        const double g = path_loss.evaluate(std::max(r, p.annuli.radius[k - 1]));
        const double s = fr.sample_conditional(u, rng);
        if (s >= g / tau) out.push_back(std::min(g / s, tau));
      }
    }
  }

  FadingRealization realize(Rng& rng) const {
    return FadingRealization(law, common ? common->sample(rng) : 1.0);
  }

  PropagationProcess simulate(std::uint64_t seed) const {
    Rng rng = make_rng(seed);
    const std::uint64_t pattern_seed = derive_seed(seed, 1);
    std::vector<double> out;
    std::visit(overloaded{
                   [&](const FiniteSource&) {
                     const auto fr = realize(rng);
                     simulate_sorted(finite, fr, tau, options.annulus_ratio, rng, out);
                   },
                   [&](const LatticeSource&) {
                     const auto fr = realize(rng);
                     simulate_lattice(fr, rng, out);
                   },
                   [&](const PoissonSource& s) {
                     if (std::isinf(s.r_max)) {
                       const auto fr = realize(rng);
                       simulate_poisson(poisson[0], fr, rng, out);
                     } else {
                       const auto plan =
                           plan_from_pattern(sample_poisson(s.intensity, s.r_max, pattern_seed), path_loss);
                       const auto fr = realize(rng);
                       simulate_sorted(plan, fr, tau, options.annulus_ratio, rng, out);
                     }
                   },
                   [&](const CoxMixtureSource& s) {
                     if (std::isinf(s.r_max)) {
                       const bool first = uniform01(rng) < 0.5;
                       const auto fr = realize(rng);
                       simulate_poisson(poisson[first ? 0 : 1], fr, rng, out);
                     } else {
                       const auto plan = plan_from_pattern(
                           sample_cox_mixture(s.lambda1, s.lambda2, s.r_max, pattern_seed), path_loss);
                       const auto fr = realize(rng);
                       simulate_sorted(plan, fr, tau, options.annulus_ratio, rng, out);
                     }
                   },
                   [&](const GinibreSource&) {
                     const auto fr = realize(rng);
                     simulate_ginibre(ginibre, path_loss, fr, tau, rng, out);
                   },
               },
               source);
    return PropagationProcess(std::move(out), tau, source_name(source) + "|" + std::to_string(seed));
  }

  // ---- measures ----------------------------------------------------------

  // E c * min(h^-1(tS), r_max)^2.
  double disk_mean(double coefficient, double r_max, double t) const {
    std::vector<double> kinks;
    if (std::isfinite(r_max)) kinks.push_back(path_loss.evaluate(r_max) / t);
    return fading.expect(
        [&](double s) {
          const double rho = std::min(path_loss.inverse(t * s), r_max);
          if (std::isinf(rho)) return kInf;
          return coefficient * rho * rho;
        },
        kinks);
  }

  double lattice_far_mean(double t) const {
    const LatticePlan& p = lattice;
    const Annuli& a = p.annuli;
    std::vector<double> kinks;
    for (double g : a.gain) kinks.push_back(g / t);
    return fading.expect(
        [&](double s) {
          const double rho = path_loss.inverse(t * s);
          if (rho <= a.radius[0]) return 0.0;
          if (std::isinf(rho)) return kInf;
          const double rho_sq = rho * rho;
          const std::size_t K = a.size();
          if (rho_sq >= a.radius_sq[K]) {
            return static_cast<double>(p.prefix[K]) + p.coefficient * (rho_sq - a.radius_sq[K]);
          }
          const auto k = static_cast<std::size_t>(
              std::upper_bound(a.radius_sq.begin(), a.radius_sq.end(), rho_sq) - a.radius_sq.begin());
          const double w = static_cast<double>(p.counts[k - 1]) / (a.radius_sq[k] - a.radius_sq[k - 1]);
          return static_cast<double>(p.prefix[k - 1]) + w * (rho_sq - a.radius_sq[k - 1]);
        },
        kinks);
  }

  double finite_sum(const FinitePlan& plan, double t, int power) const {
    double total = 0.0;
    for (double g : plan.gains) {
      const double p = reach(fading, g, t);
      if (p == 0.0) break;
      total += power == 1 ? p : p * p;
    }
    return total;
  }

  // Integral of p(r)^2 * 2 r dr over [lo, hi], split geometrically.
  double p_sq_integral(double lo, double hi, double t) const {
    auto g = [&](double r) {
      if (!(r > 0.0)) return 0.0;
      const double p = reach(fading, path_loss.evaluate(r), t);
      return p * p * 2.0 * r;
    };
    if (std::isinf(hi)) {
      double start = lo;
      double head = 0.0;
      if (!(start > 0.0)) {
        start = 1.0;
        head = p_sq_integral(0.0, 1.0, t);
      }
      return head + integrate_to_infinity(g, start, 1e-16);
    }
    std::vector<double> cuts;
    if (lo > 0.0) {
      for (double x = lo * 2.0; x < hi; x *= 2.0) cuts.push_back(x);
    } else {
      for (double x = hi / 2.0; x > hi * 1e-15; x /= 2.0) cuts.push_back(x);
    }
    return integrate_piecewise(g, lo, hi, cuts);
  }

  double mean_measure(double t) const {
    if (!(t > 0.0)) return 0.0;
    return std::visit(
        overloaded{
            [&](const FiniteSource&) { return finite_sum(finite, t, 1); },
            [&](const LatticeSource&) { return finite_sum(lattice.direct, t, 1) + lattice_far_mean(t); },
            [&](const PoissonSource& s) { return disk_mean(s.intensity * kPi, s.r_max, t); },
            [&](const CoxMixtureSource& s) {
              return 0.5 * (disk_mean(s.lambda1 * kPi, s.r_max, t) + disk_mean(s.lambda2 * kPi, s.r_max, t));
            },
            [&](const GinibreSource& s) { return disk_mean(s.params.c, s.r_max, t); },
        },
        source);
  }

  double sum_p_squared(double t) const {
    if (!(t > 0.0)) return 0.0;
    return std::visit(
        overloaded{
            [&](const FiniteSource&) { return finite_sum(finite, t, 2); },
            [&](const LatticeSource&) {
              const LatticePlan& p = lattice;
              const Annuli& a = p.annuli;
              double total = finite_sum(p.direct, t, 2);
              for (std::size_t k = 1; k <= a.size(); ++k) {
                const double w = static_cast<double>(p.counts[k - 1]) / (a.radius_sq[k] - a.radius_sq[k - 1]);
                total += w * p_sq_integral(a.radius[k - 1], a.radius[k], t);
              }
              return total + p.coefficient * p_sq_integral(a.radius.back(), kInf, t);
            },
            [&](const PoissonSource& s) { return s.intensity * kPi * p_sq_integral(0.0, s.r_max, t); },
            [&](const CoxMixtureSource& s) {
              return 0.5 * (s.lambda1 + s.lambda2) * kPi * p_sq_integral(0.0, s.r_max, t);
            },
            [&](const GinibreSource& s) { return s.params.c * p_sq_integral(0.0, s.r_max, t); },
        },
        source);
  }

  double max_p(double t) const {
    if (const auto* f = std::get_if<FiniteSource>(&source)) {
      (void)f;
      return finite.gains.empty() ? 0.0 : reach(fading, finite.gains.front(), t);
    }
    if (std::holds_alternative<LatticeSource>(source)) {
      return lattice.direct.gains.empty() ? 0.0 : reach(fading, lattice.direct.gains.front(), t);
    }
    return 1.0;
  }
};

RestrictedSimulator::RestrictedSimulator(RadialSource source, PathLoss path_loss, Fading fading,
                                         double tau, SimulatorOptions options)
    : impl_(std::make_shared<const Impl>(std::move(source), std::move(path_loss), std::move(fading),
                                         tau, options)) {}

double RestrictedSimulator::tau() const noexcept { return impl_->tau; }
const RadialSource& RestrictedSimulator::source() const noexcept { return impl_->source; }
const PathLoss& RestrictedSimulator::path_loss() const noexcept { return impl_->path_loss; }
const Fading& RestrictedSimulator::fading() const noexcept { return impl_->fading; }

PropagationProcess RestrictedSimulator::simulate(std::uint64_t seed) const {
  return impl_->simulate(seed);
}

std::vector<PropagationProcess> RestrictedSimulator::simulate_batch(std::size_t n,
                                                                    std::uint64_t base_seed) const {
  return parallel_map<PropagationProcess>(
      n, [&](std::size_t i) { return impl_->simulate(derive_seed(base_seed, i)); });
}

double RestrictedSimulator::mean_measure(double t) const { return impl_->mean_measure(t); }
double RestrictedSimulator::sum_p_squared(double t) const { return impl_->sum_p_squared(t); }
double RestrictedSimulator::max_p(double t) const { return impl_->max_p(t); }

std::size_t RestrictedSimulator::annulus_count() const noexcept {
  if (std::holds_alternative<LatticeSource>(impl_->source)) return impl_->lattice.annuli.size();
  return impl_->poisson[0].annuli.size();
}

double RestrictedSimulator::outer_radius() const noexcept {
  return std::visit(overloaded{
                        [&](const FiniteSource& s) { return s.pattern.r_max(); },
                        [&](const LatticeSource&) { return impl_->lattice.annuli.radius.back(); },
                        [&](const PoissonSource& s) {
                          return std::isinf(s.r_max) ? impl_->poisson[0].annuli.radius.back() : s.r_max;
                        },
                        [&](const CoxMixtureSource& s) {
                          return std::isinf(s.r_max)
                                     ? std::max(impl_->poisson[0].annuli.radius.back(),
                                                impl_->poisson[1].annuli.radius.back())
                                     : s.r_max;
                        },
                        [&](const GinibreSource& s) { return s.r_max; },
                    },
                    impl_->source);
}

}  // namespace propsim
