#include "propsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "propsim/error.hpp"
#include "propsim/numeric.hpp"
#include "propsim/random.hpp"

namespace propsim {

namespace {

constexpr double kWindowSlack = 1e-12;

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ParameterError(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

double Point2::norm() const noexcept { return std::hypot(x, y); }

double Point2::angle() const noexcept { return std::atan2(y, x); }

const char* to_string(LatticeKind kind) noexcept {
  switch (kind) {
    case LatticeKind::triangular:
      return "triangular";
    case LatticeKind::hexagonal:
      return "hexagonal";
    case LatticeKind::square:
      return "square";
  }
  return "unknown";
}

LatticeKind lattice_kind_from_string(const std::string& name) {
  if (name == "triangular") return LatticeKind::triangular;
  if (name == "hexagonal") return LatticeKind::hexagonal;
  if (name == "square") return LatticeKind::square;
  throw ParameterError("unknown lattice kind '" + name + "'");
}

// ---------------------------------------------------------------------------
// PointPattern2D

PointPattern2D::PointPattern2D(std::vector<Point2> points, double r_max, Provenance provenance)
    : r_max_(r_max), provenance_(std::move(provenance)) {
  require_positive(r_max, "r_max");

  struct Entry {
    Point2 p;
    double r;
    double theta;
  };
  std::vector<Entry> entries;
  entries.reserve(points.size());
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw ParameterError("pattern points must be finite");
    }
    double r = p.norm();
    if (r == 0.0) throw ParameterError("pattern points must exclude the origin");
    if (r > r_max * (1.0 + kWindowSlack)) {
      throw ParameterError("pattern point outside the disk of radius r_max");
    }
    r = std::min(r, r_max);
    entries.push_back({p, r, p.angle()});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.r != b.r ? a.r < b.r : a.theta < b.theta;
  });

  points_.reserve(entries.size());
  radii_.reserve(entries.size());
  for (const auto& e : entries) {
    points_.push_back(e.p);
    radii_.push_back(e.r);
  }
}

PointPattern2D PointPattern2D::from_radii(std::vector<double> radii, double r_max,
                                          Provenance provenance) {
  std::vector<Point2> points;
  points.reserve(radii.size());
  for (double r : radii) points.push_back({r, 0.0});
  return PointPattern2D(std::move(points), r_max, std::move(provenance));
}

std::size_t PointPattern2D::radial_count(double r) const {
  if (!(r >= 0.0)) throw DomainError("radial_count: radius must be non-negative");
  if (r > r_max_) throw OutOfWindowError(r, r_max_);
  return static_cast<std::size_t>(std::upper_bound(radii_.begin(), radii_.end(), r) -
                                  radii_.begin());
}

std::size_t radial_count(const PointPattern2D& pattern, double r) {
  return pattern.radial_count(r);
}

// ---------------------------------------------------------------------------
// GrowthFunction

GrowthFunction GrowthFunction::lattice(LatticeKind kind, double s) {
  require_positive(s, "edge length");
  const double pi = std::numbers::pi;
  switch (kind) {
    case LatticeKind::triangular:
      return {Kind::triangular, s, 2.0 * pi / (std::sqrt(3.0) * s * s)};
    case LatticeKind::hexagonal:
      return {Kind::hexagonal, s, 4.0 * pi / (3.0 * std::sqrt(3.0) * s * s)};
    case LatticeKind::square:
      return {Kind::square, s, pi / (s * s)};
  }
  throw ParameterError("unknown lattice kind");
}

GrowthFunction GrowthFunction::disk_area(double intensity) {
  require_positive(intensity, "intensity");
  return {Kind::disk_area, intensity, intensity * std::numbers::pi};
}

double GrowthFunction::operator()(double r) const {
  if (!(r >= 0.0)) throw DomainError("growth function: radius must be non-negative");
  return coefficient_ * r * r;
}

double GrowthFunction::density(double r) const {
  if (!(r >= 0.0)) throw DomainError("growth function: radius must be non-negative");
  return 2.0 * coefficient_ * r;
}

double GrowthFunction::intensity() const noexcept { return coefficient_ / std::numbers::pi; }

double growth_value(const GrowthFunction& growth, double r) { return growth(r); }

// ---------------------------------------------------------------------------
// Lattices

Point2 LatticeGeometry::vertex(std::int64_t i, std::int64_t j, std::size_t b) const noexcept {
  const double di = static_cast<double>(i);
  const double dj = static_cast<double>(j);
  return {di * a1.x + dj * a2.x + basis[b].x, di * a1.y + dj * a2.y + basis[b].y};
}

namespace {

bool inside(const Point2& p, double radius_sq) { return p.x * p.x + p.y * p.y <= radius_sq; }

// Inclusive index range [lo, hi] of row (j, b) inside the disk; lo > hi when
// empty. a1 is horizontal for every geometry built here.
std::pair<std::int64_t, std::int64_t> row_range(const LatticeGeometry& g, std::int64_t j,
                                                std::size_t b, double radius_sq) {
  const Point2 base = g.vertex(0, j, b);
  const double rem = radius_sq - base.y * base.y;
  if (rem < 0.0) return {1, 0};
  const double w = std::sqrt(rem);
  auto lo = static_cast<std::int64_t>(std::ceil((-w - base.x) / g.a1.x));
  auto hi = static_cast<std::int64_t>(std::floor((w - base.x) / g.a1.x));
  // Reconcile the analytic bounds with the exact predicate at the edges.
  while (inside(g.vertex(hi + 1, j, b), radius_sq)) ++hi;
  while (hi >= lo && !inside(g.vertex(hi, j, b), radius_sq)) --hi;
  while (inside(g.vertex(lo - 1, j, b), radius_sq)) --lo;
  while (lo <= hi && !inside(g.vertex(lo, j, b), radius_sq)) ++lo;
  return {lo, hi};
}

std::int64_t row_limit(const LatticeGeometry& g, double radius) {
  double max_offset = 0.0;
  for (const auto& b : g.basis) max_offset = std::max(max_offset, std::abs(b.y));
  return static_cast<std::int64_t>(std::ceil((radius + max_offset) / g.a2.y)) + 1;
}

}  // namespace

std::int64_t LatticeGeometry::count_in_disk(double radius_sq) const {
  if (radius_sq < 0.0) return 0;
  const double radius = std::sqrt(radius_sq);
  const std::int64_t rows = row_limit(*this, radius);
  std::int64_t total = 0;
  for (std::size_t b = 0; b < basis.size(); ++b) {
    for (std::int64_t j = -rows; j <= rows; ++j) {
      const auto [lo, hi] = row_range(*this, j, b, radius_sq);
      if (hi >= lo) total += hi - lo + 1;
    }
  }
  return total - 1;  // origin
}

LatticeGeometry lattice_geometry(LatticeKind kind, double s) {
  require_positive(s, "edge length");
  const double r3 = std::sqrt(3.0);
  LatticeGeometry g;
  switch (kind) {
    case LatticeKind::square:
      g.a1 = {s, 0.0};
      g.a2 = {0.0, s};
      g.basis = {{0.0, 0.0}};
      break;
    case LatticeKind::triangular:
      g.a1 = {s, 0.0};
      g.a2 = {0.5 * s, 0.5 * r3 * s};
      g.basis = {{0.0, 0.0}};
      break;
    case LatticeKind::hexagonal:
      // Honeycomb: triangular Bravais lattice of spacing sqrt(3) s with a
      // two-vertex basis one edge apart.
      g.a1 = {r3 * s, 0.0};
      g.a2 = {0.5 * r3 * s, 1.5 * s};
      g.basis = {{0.0, 0.0}, {0.0, s}};
      break;
  }
  g.cell_area = std::abs(g.a1.x * g.a2.y - g.a1.y * g.a2.x);
  return g;
}

PointPattern2D make_lattice(LatticeKind kind, double s, double r_max) {
  require_positive(s, "edge length");
  require_positive(r_max, "r_max");
  const LatticeGeometry g = lattice_geometry(kind, s);
  const double radius_sq = r_max * r_max;
  const std::int64_t rows = row_limit(g, r_max);

  std::vector<Point2> points;
  for (std::size_t b = 0; b < g.basis.size(); ++b) {
    for (std::int64_t j = -rows; j <= rows; ++j) {
      const auto [lo, hi] = row_range(g, j, b, radius_sq);
      for (std::int64_t i = lo; i <= hi; ++i) {
        const Point2 p = g.vertex(i, j, b);
        if (p.x == 0.0 && p.y == 0.0) continue;
        points.push_back(p);
      }
    }
  }
  Provenance prov{std::string("lattice/") + to_string(kind), {{"s", s}, {"r_max", r_max}}, 0};
  return PointPattern2D(std::move(points), r_max, std::move(prov));
}

// ---------------------------------------------------------------------------
// Random patterns

namespace {

Point2 uniform_in_disk(double r_max, Rng& rng) {
  const double r = r_max * std::sqrt(uniform_open0(rng));
  const double theta = 2.0 * std::numbers::pi * uniform01(rng);
  return {r * std::cos(theta), r * std::sin(theta)};
}

std::vector<Point2> poisson_points(double intensity, double r_max, Rng& rng) {
  std::poisson_distribution<std::int64_t> count(intensity * std::numbers::pi * r_max * r_max);
  const std::int64_t n = count(rng);
  std::vector<Point2> points;
  points.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) points.push_back(uniform_in_disk(r_max, rng));
  return points;
}

}  // namespace

PointPattern2D sample_poisson(double intensity, double r_max, std::uint64_t seed) {
  require_positive(intensity, "intensity");
  require_positive(r_max, "r_max");
  Rng rng = make_rng(seed);
  Provenance prov{"poisson", {{"lambda", intensity}, {"r_max", r_max}}, seed};
  return PointPattern2D(poisson_points(intensity, r_max, rng), r_max, std::move(prov));
}

void GinibreParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("Ginibre alpha must lie in (0, 1]");
  require_positive(c, "Ginibre c");
}

std::int64_t ginibre_index_cutoff(const GinibreParams& params, double r_max, double tolerance) {
  params.validate();
  require_positive(r_max, "r_max");
  // P(Gamma(k, alpha/c) <= r_max^2) = P(X >= k) for X ~ Poisson(mu), so the
  // expected number of retained indices k > K landing in the disk is
  // alpha * E[(X - K)^+].
  const double mu = params.c * r_max * r_max / params.alpha;
  const double spread = 60.0 * std::sqrt(mu) + 200.0;
  auto omitted = [&](std::int64_t cutoff) {
    double total = 0.0;
    const auto last = static_cast<std::int64_t>(std::ceil(mu + spread)) + cutoff;
    for (std::int64_t j = cutoff + 1; j <= last; ++j) {
      const double term = static_cast<double>(j - cutoff) * poisson_pmf(j, mu);
      total += term;
      if (j > mu && term < 1e-30) break;
    }
    return params.alpha * total;
  };
  std::int64_t lo = 0;
  auto hi = static_cast<std::int64_t>(std::ceil(mu + spread));
  while (omitted(hi) >= tolerance) hi *= 2;
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (omitted(mid) < tolerance ? hi : lo) = mid;
  }
  return std::max<std::int64_t>(hi, 1);
}

PointPattern2D sample_alpha_ginibre_radial(const GinibreParams& params, double r_max,
                                           std::uint64_t seed, std::int64_t index_cutoff) {
  params.validate();
  require_positive(r_max, "r_max");
  const std::int64_t cutoff =
      index_cutoff > 0 ? index_cutoff : ginibre_index_cutoff(params, r_max);
  const double scale = params.alpha / params.c;
  const double radius_sq = r_max * r_max;

  Rng rng = make_rng(seed);
  std::vector<Point2> points;
  points.reserve(static_cast<std::size_t>(params.c * radius_sq * 1.1) + 16);
  for (std::int64_t k = 1; k <= cutoff; ++k) {
    if (uniform01(rng) >= params.alpha) continue;
    std::gamma_distribution<double> modulus_sq(static_cast<double>(k), scale);
    const double m = modulus_sq(rng);
    const double theta = 2.0 * std::numbers::pi * uniform01(rng);
    if (m > radius_sq || m == 0.0) continue;
    const double r = std::sqrt(m);
    points.push_back({r * std::cos(theta), r * std::sin(theta)});
  }
  Provenance prov{"ginibre_radial",
                  {{"alpha", params.alpha},
                   {"c", params.c},
                   {"r_max", r_max},
                   {"k_max", static_cast<double>(cutoff)}},
                  seed};
  return PointPattern2D(std::move(points), r_max, std::move(prov));
}

PointPattern2D sample_alpha_ginibre(const GinibreParams& params, double r_max,
                                    std::uint64_t seed, std::int64_t index_cutoff) {
  params.validate();
  require_positive(r_max, "r_max");
  const std::int64_t cutoff =
      index_cutoff > 0 ? index_cutoff : ginibre_index_cutoff(params, r_max);
  const double kappa = params.c / params.alpha;
  const double edge = kappa * r_max * r_max;
  constexpr double pi = std::numbers::pi;

  Rng rng = make_rng(seed);
  // Selected indices with log of the normalizing constant of z^k e^{-kappa|z|^2/2}
  // on the disk.
  std::vector<double> order;
  std::vector<double> mass;
  std::vector<double> log_norm;
  for (std::int64_t k = 0; k < cutoff; ++k) {
    const double a = static_cast<double>(k + 1);
    const double lambda = boost::math::gamma_p(a, edge);
    if (uniform01(rng) >= params.alpha * lambda) continue;
    order.push_back(static_cast<double>(k));
    mass.push_back(lambda);
    log_norm.push_back(std::log(pi) + std::lgamma(a) - a * std::log(kappa) + std::log(lambda));
  }
  const std::size_t n = order.size();

  using Complex = std::complex<double>;
  auto features = [&](double m, double theta, std::vector<Complex>& v) {
    const double log_m = std::log(m);
    for (std::size_t i = 0; i < n; ++i) {
      const double log_abs = 0.5 * (order[i] * log_m - kappa * m - log_norm[i]);
      v[i] = std::polar(std::exp(log_abs), order[i] * theta);
    }
  };

  std::vector<std::vector<Complex>> basis;
  basis.reserve(n);
  std::vector<Point2> points;
  points.reserve(n);
  std::vector<Complex> v(n);
  std::uniform_int_distribution<std::size_t> pick(0, n == 0 ? 0 : n - 1);
  while (points.size() < n) {
    const std::size_t i = pick(rng);
    // m = |z|^2 from the mixture component of index i.
    const double u = std::max(uniform01(rng), 1e-300);
    const double m = boost::math::gamma_p_inv(order[i] + 1.0, u * mass[i]) / kappa;
    const double theta = 2.0 * pi * uniform01(rng);
    if (!(m > 0.0)) continue;
    features(m, theta, v);
    double total = 0.0;
    for (const Complex& x : v) total += std::norm(x);
    // Two Gram-Schmidt passes keep the residual orthogonal in floating point.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& e : basis) {
        Complex dot = 0.0;
        for (std::size_t j = 0; j < n; ++j) dot += std::conj(e[j]) * v[j];
        for (std::size_t j = 0; j < n; ++j) v[j] -= dot * e[j];
      }
    }
    double residual = 0.0;
    for (const Complex& x : v) residual += std::norm(x);
    if (!(total > 0.0) || uniform01(rng) * total >= residual) continue;
    const double scale = 1.0 / std::sqrt(residual);
    for (Complex& x : v) x *= scale;
    basis.push_back(v);
    const double r = std::sqrt(m);
    points.push_back({r * std::cos(theta), r * std::sin(theta)});
  }
  Provenance prov{"ginibre",
                  {{"alpha", params.alpha},
                   {"c", params.c},
                   {"r_max", r_max},
                   {"k_max", static_cast<double>(cutoff)}},
                  seed};
  return PointPattern2D(std::move(points), r_max, std::move(prov));
}

PointPattern2D sample_cox_mixture(double lambda1, double lambda2, double r_max,
                                  std::uint64_t seed) {
  require_positive(lambda1, "lambda1");
  require_positive(lambda2, "lambda2");
  require_positive(r_max, "r_max");
  Rng rng = make_rng(seed);
  const double chosen = uniform01(rng) < 0.5 ? lambda1 : lambda2;
  Provenance prov{"cox_mixture",
                  {{"lambda1", lambda1}, {"lambda2", lambda2}, {"lambda", chosen}, {"r_max", r_max}},
                  seed};
  return PointPattern2D(poisson_points(chosen, r_max, rng), r_max, std::move(prov));
}

}  // namespace propsim
