#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "propsim/fading.hpp"
#include "propsim/geometry.hpp"
#include "propsim/path_loss.hpp"
#include "propsim/propagation.hpp"

namespace propsim {

// A fixed, complete transmitter set.
struct FiniteSource {
  PointPattern2D pattern;
};

// Every vertex of an infinite lattice except the origin.
struct LatticeSource {
  LatticeKind kind = LatticeKind::square;
  double edge_length = 1.0;
};

// Homogeneous Poisson transmitters, on the whole plane unless r_max is finite.
struct PoissonSource {
  double intensity = 1.0;
  double r_max = std::numeric_limits<double>::infinity();
};

// Poisson with intensity lambda1 or lambda2 chosen by a fair coin.
struct CoxMixtureSource {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double r_max = std::numeric_limits<double>::infinity();
};

// Alpha-Ginibre transmitters observed in the disk of radius r_max.
struct GinibreSource {
  GinibreParams params;
  double r_max = 1.0;
};

using RadialSource =
    std::variant<FiniteSource, LatticeSource, PoissonSource, CoxMixtureSource, GinibreSource>;

std::string source_name(const RadialSource& source);
// True when the transmitter set is random (Cox-type targets).
bool source_is_random(const RadialSource& source);

struct SimulatorOptions {
  // Lattice points closer than this many edge lengths are enumerated.
  double direct_radius_factor = 50.0;
  // Ratio of consecutive annulus radii in the far field.
  double annulus_ratio = 1.15;
  // Expected number of points of N|tau beyond the last annulus.
  double far_tolerance = 1e-9;
};

// Exact simulation of N restricted to (0, tau] for a radial source.
//
// Far transmitters are handled by thinning: within each annulus a point is a
// candidate with the envelope probability q at the inner radius, and a
// candidate is kept when a fading draw conditioned on S >= h(inner)/tau also
// satisfies S >= h(r)/tau. Infinite sources need a fading law with a
// conditional sampler (after realizing any shared factor).
//
// Ginibre sources run the radial construction index by index. Past the first
// 256 indices, blocks of indices are thinned against P(G <= g) + P(S >= h(sqrt g)/tau)
// and the kept ones are drawn from the product law restricted to that union.
class RestrictedSimulator {
 public:
  RestrictedSimulator(RadialSource source, PathLoss path_loss, Fading fading, double tau,
                      SimulatorOptions options = {});

  double tau() const noexcept;
  const RadialSource& source() const noexcept;
  const PathLoss& path_loss() const noexcept;
  const Fading& fading() const noexcept;

  PropagationProcess simulate(std::uint64_t seed) const;
  // Replication i uses derive_seed(base_seed, i).
  std::vector<PropagationProcess> simulate_batch(std::size_t n, std::uint64_t base_seed) const;

  // E N(t) for t > 0 under the marginal fading law; for random sources the
  // expectation is also over the transmitters.
  double mean_measure(double t) const;
  // Sum of p_x(t)^2 over the transmitters; for random sources its
  // expectation E sum p^2 (the Cox bound).
  double sum_p_squared(double t) const;
  // Largest single-point reach probability (1 for sources with points
  // arbitrarily close to the observer).
  double max_p(double t) const;
  // Number of far-field annuli used (0 for finite sources).
  std::size_t annulus_count() const noexcept;
  // Radius beyond which transmitters are ignored.
  double outer_radius() const noexcept;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

}  // namespace propsim
