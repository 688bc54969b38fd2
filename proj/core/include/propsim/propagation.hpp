#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "propsim/fading.hpp"
#include "propsim/geometry.hpp"
#include "propsim/path_loss.hpp"

namespace propsim {

// Inverse received powers Y_i = h(|x_i|) / S_i, ascending, optionally
// restricted to (0, tau].
class PropagationProcess {
 public:
  PropagationProcess() = default;
  // Values need not be sorted; they must be positive. With tau set, all
  // values must be <= tau.
  explicit PropagationProcess(std::vector<double> values, std::optional<double> tau = {},
                              std::string provenance = {});

  std::span<const double> values() const noexcept { return values_; }
  std::optional<double> tau() const noexcept { return tau_; }
  const std::string& provenance() const noexcept { return provenance_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  // Number of values <= t.
  std::size_t count(double t) const;

 private:
  std::vector<double> values_;
  std::optional<double> tau_;
  std::string provenance_;
};

// Received powers P_i = 1 / Y_i in descending order. Built from a propagation
// process it keeps that process, so the round trip is exact.
class PowerProcess {
 public:
  static PowerProcess from_propagation(PropagationProcess process);
  static PowerProcess from_powers(std::vector<double> powers);

  std::vector<double> powers() const;
  // Lower end of the observation window [1/tau, inf), if any.
  std::optional<double> floor() const;
  const PropagationProcess& propagation() const noexcept { return process_; }
  std::size_t size() const noexcept { return process_.size(); }

 private:
  explicit PowerProcess(PropagationProcess process) : process_(std::move(process)) {}

  PropagationProcess process_;
};

// One fading draw per point, in pattern order; shared-factor models draw their
// common factor once per call.
PropagationProcess generate(const PointPattern2D& pattern, const PathLoss& path_loss,
                            const Fading& fading, std::uint64_t seed);

PropagationProcess restrict_to(const PropagationProcess& process, double tau);

PowerProcess invert_to_powers(const PropagationProcess& process);
PropagationProcess invert_to_propagation(const PowerProcess& powers);

// p(t) = P(h(r) / S <= t) = P(S >= h(r) / t) for a point at radius r.
double point_probability(const PathLoss& path_loss, const Fading& fading, double r, double t);

// Smallest radius (to 1e-6 relative) beyond which a single point reaches
// (0, tau] with probability below eps. +inf if no such radius exists.
double suggest_r_max(const PathLoss& path_loss, const Fading& fading, double tau,
                     double eps = 1e-6);

}  // namespace propsim
