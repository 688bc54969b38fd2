#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace propsim {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  double norm() const noexcept;
  double angle() const noexcept;  // in (-pi, pi]
};

enum class LatticeKind { triangular, hexagonal, square };

const char* to_string(LatticeKind kind) noexcept;
LatticeKind lattice_kind_from_string(const std::string& name);

// Where a pattern came from: generator name, numeric parameters, seed.
struct Provenance {
  std::string kind;
  std::map<std::string, double> params;
  std::uint64_t seed = 0;
};

// A finite set of transmitter positions inside the disk of radius r_max,
// excluding the origin. Points are kept sorted by (radius, angle) so that
// fading draws attach to them in a fixed order.
class PointPattern2D {
 public:
  PointPattern2D() = default;
  PointPattern2D(std::vector<Point2> points, double r_max, Provenance provenance = {});

  // Pattern given only by distances to the observer; points are placed on the
  // positive x-axis. Lets non-planar patterns enter the radial pipeline.
  static PointPattern2D from_radii(std::vector<double> radii, double r_max,
                                   Provenance provenance = {});

  std::span<const Point2> points() const noexcept { return points_; }
  // Radii aligned with points(), ascending.
  std::span<const double> radii() const noexcept { return radii_; }
  double r_max() const noexcept { return r_max_; }
  const Provenance& provenance() const noexcept { return provenance_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }

  // |{x : 0 < |x| <= r}|. Throws OutOfWindowError for r > r_max.
  std::size_t radial_count(double r) const;

 private:
  std::vector<Point2> points_;
  std::vector<double> radii_;
  double r_max_ = 0.0;
  Provenance provenance_;
};

// Asymptotic point count D(r) = coefficient * r^2 of a lattice or a
// stationary pattern of given intensity.
class GrowthFunction {
 public:
  enum class Kind { triangular, hexagonal, square, disk_area };

  static GrowthFunction lattice(LatticeKind kind, double edge_length);
  static GrowthFunction disk_area(double intensity);

  Kind kind() const noexcept { return kind_; }
  double operator()(double r) const;
  double density(double r) const;  // dD/dr
  // Points per unit area.
  double intensity() const noexcept;
  double coefficient() const noexcept { return coefficient_; }
  double parameter() const noexcept { return parameter_; }  // s or lambda

 private:
  GrowthFunction(Kind kind, double parameter, double coefficient)
      : kind_(kind), parameter_(parameter), coefficient_(coefficient) {}

  Kind kind_;
  double parameter_;
  double coefficient_;
};

double growth_value(const GrowthFunction& growth, double r);

// Bravais vectors plus basis of a planar lattice whose vertex set contains the
// origin. Vertex (i, j, b) sits at i*a1 + j*a2 + basis[b].
struct LatticeGeometry {
  Point2 a1;
  Point2 a2;
  std::vector<Point2> basis;
  double cell_area = 0.0;  // area per Bravais cell

  Point2 vertex(std::int64_t i, std::int64_t j, std::size_t b) const noexcept;
  // Number of vertices with 0 < x^2 + y^2 <= radius_sq, using exactly the
  // floating point predicate vertex() + squared norm would give.
  std::int64_t count_in_disk(double radius_sq) const;
};

LatticeGeometry lattice_geometry(LatticeKind kind, double edge_length);

struct GinibreParams {
  double alpha = 1.0;
  double c = 1.0;

  void validate() const;
};

// All vertices of the lattice in the closed disk of radius r_max, origin
// removed.
PointPattern2D make_lattice(LatticeKind kind, double edge_length, double r_max);

// Homogeneous Poisson process on the disk.
PointPattern2D sample_poisson(double intensity, double r_max, std::uint64_t seed);

// Alpha-Ginibre process on the disk, sampled exactly as a determinantal
// process. On the disk of radius R the kernel diagonalizes in z^k e^{-c|z|^2 /
// (2 alpha)}, k >= 0, with eigenvalues alpha * P(k + 1, c R^2 / alpha). Indices
// are kept independently with those probabilities and the positions follow
// the sequential projection sampler. Cost grows like n^3 in the point count n.
// index_cutoff = 0 computes the cutoff with ginibre_index_cutoff().
PointPattern2D sample_alpha_ginibre(const GinibreParams& params, double r_max,
                                    std::uint64_t seed, std::int64_t index_cutoff = 0);

// Same count and moduli law as sample_alpha_ginibre in linear time: index k
// is kept with probability alpha and then has squared modulus
// Gamma(k, alpha / c); points outside the disk are dropped. Angles are
// independent and uniform, so only radial statistics are exact.
PointPattern2D sample_alpha_ginibre_radial(const GinibreParams& params, double r_max,
                                           std::uint64_t seed, std::int64_t index_cutoff = 0);

// Smallest index cutoff such that the expected number of omitted points inside
// the disk is below `tolerance`.
std::int64_t ginibre_index_cutoff(const GinibreParams& params, double r_max,
                                  double tolerance = 1e-8);

// Poisson with intensity lambda1 or lambda2, chosen by a fair coin.
// Provenance records the chosen value under "lambda".
PointPattern2D sample_cox_mixture(double lambda1, double lambda2, double r_max,
                                  std::uint64_t seed);

std::size_t radial_count(const PointPattern2D& pattern, double r);

}  // namespace propsim
