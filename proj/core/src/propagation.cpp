#include "propsim/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "propsim/error.hpp"

namespace propsim {

PropagationProcess::PropagationProcess(std::vector<double> values, std::optional<double> tau,
                                       std::string provenance)
    : values_(std::move(values)), tau_(tau), provenance_(std::move(provenance)) {
  if (tau_ && !(*tau_ > 0.0)) throw ParameterError("restriction threshold must be positive");
  for (double y : values_) {
    if (!(y > 0.0)) throw ParameterError("propagation values must be positive");
    if (tau_ && y > *tau_) throw ParameterError("propagation value exceeds the restriction");
  }
  std::sort(values_.begin(), values_.end());
}

std::size_t PropagationProcess::count(double t) const {
  return static_cast<std::size_t>(std::upper_bound(values_.begin(), values_.end(), t) -
                                  values_.begin());
}

PowerProcess PowerProcess::from_propagation(PropagationProcess process) {
  return PowerProcess(std::move(process));
}

PowerProcess PowerProcess::from_powers(std::vector<double> powers) {
  for (double& p : powers) {
    if (!(p > 0.0) || std::isinf(p)) throw ParameterError("powers must be positive and finite");
    p = 1.0 / p;
  }
  return PowerProcess(PropagationProcess(std::move(powers)));
}

std::vector<double> PowerProcess::powers() const {
  std::vector<double> out;
  out.reserve(process_.size());
  for (double y : process_.values()) out.push_back(1.0 / y);
  return out;
}

std::optional<double> PowerProcess::floor() const {
  if (!process_.tau()) return std::nullopt;
  return 1.0 / *process_.tau();
}

PropagationProcess generate(const PointPattern2D& pattern, const PathLoss& path_loss,
                            const Fading& fading, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  const FadingRealization realization = fading.realize(rng);
  std::vector<double> values;
  values.reserve(pattern.size());
  for (double r : pattern.radii()) values.push_back(path_loss.evaluate(r) / realization.sample(rng));
  return PropagationProcess(std::move(values), std::nullopt,
                            pattern.provenance().kind + "|" + path_loss.kind_name() + "|" +
                                fading.kind_name() + "|" + std::to_string(seed));
}

PropagationProcess restrict_to(const PropagationProcess& process, double tau) {
  if (!(tau > 0.0)) throw ParameterError("restriction threshold must be positive");
  const double bound = process.tau() ? std::min(*process.tau(), tau) : tau;
  std::vector<double> kept(process.values().begin(),
                           process.values().begin() + static_cast<std::ptrdiff_t>(process.count(bound)));
  return PropagationProcess(std::move(kept), bound, process.provenance());
}

PowerProcess invert_to_powers(const PropagationProcess& process) {
  return PowerProcess::from_propagation(process);
}

PropagationProcess invert_to_propagation(const PowerProcess& powers) { return powers.propagation(); }

double point_probability(const PathLoss& path_loss, const Fading& fading, double r, double t) {
  if (!(t > 0.0)) throw DomainError("point probability needs t > 0");
  return fading.tail(path_loss.evaluate(r) / t);
}

double suggest_r_max(const PathLoss& path_loss, const Fading& fading, double tau, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("eps must lie in (0, 1)");
  double hi = 1.0;
  while (point_probability(path_loss, fading, hi, tau) >= eps) {
    hi *= 2.0;
    if (hi > 1e300) return std::numeric_limits<double>::infinity();
  }
  double lo = 0.0;
  while (hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid > 0.0 && point_probability(path_loss, fading, mid, tau) >= eps) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace propsim
