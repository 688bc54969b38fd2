#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "propsim/random.hpp"

namespace propsim {

class Fading;

// S = exp(sigma B - sigma^2 / beta), B standard normal. E S^(2/beta) = 1.
struct Lognormal {
  double sigma = 0.0;
  double beta = 1.0;
};

// Rate-mu exponential.
struct Exponential {
  double rate = 1.0;
};

struct Deterministic {
  double value = 1.0;
};

// scale * F_1 * ... * F_m with independent random factors F_j. Deterministic
// components are folded into scale.
struct Product {
  double scale = 1.0;
  std::vector<Fading> factors;
};

// S_i = idiosyncratic_i * common, with one common draw per realization of the
// propagation process.
struct SharedFactor {
  std::shared_ptr<const Fading> idiosyncratic;
  std::shared_ptr<const Fading> common;
};

class FadingRealization;

// Distribution of the fading variable S > 0.
class Fading {
 public:
  enum class Kind { lognormal, exponential, deterministic, product, shared_factor };

  static Fading lognormal(double sigma, double beta);
  static Fading exponential(double rate);
  static Fading deterministic(double value);
  static Fading product(std::vector<Fading> components);
  static Fading shared_factor(Fading idiosyncratic, Fading common);
  // lognormal(sigma, beta) times an exponential of rate Gamma(1 + 2/beta)^(beta/2).
  static Fading suzuki(double sigma, double beta);

  Kind kind() const noexcept { return kind_; }
  std::string kind_name() const;

  // One draw from the marginal law.
  double sample(Rng& rng) const;
  double sample(std::uint64_t seed) const;
  // n draws of one realization: shared_factor draws its common factor once.
  std::vector<double> sample_batch(std::size_t n, Rng& rng) const;
  // Draws the replication-level randomness (the common factor, if any).
  FadingRealization realize(Rng& rng) const;

  // P(S >= s) for s > 0, marginal over any common factor.
  double tail(double s) const;
  // E S^p for p > 0. +inf when the moment diverges; NumericError when it is
  // finite but not representable.
  double fractional_moment(double p) const;
  // E f(S) under the marginal law by quadrature. `kinks` are values of s at
  // which f is not smooth. Products nest one quadrature per random factor,
  // with the tolerance relaxed by 1000 per level outward.
  double expect(const std::function<double(double)>& f, std::span<const double> kinks = {},
                double rel_tol = 1e-12) const;

  // Whether S | S >= u can be drawn directly. Not available for products of
  // two or more random factors or for shared_factor at the marginal level.
  bool has_conditional_sampler() const noexcept;
  // Draw from S | S >= u. Requires P(S >= u) > 0.
  double sample_conditional(double u, Rng& rng) const;

  // Every lognormal parameter sigma inside the model replaced by `sigma`.
  Fading with_sigma(double sigma) const;

  const Lognormal* as_lognormal() const noexcept;
  const Exponential* as_exponential() const noexcept;
  const Deterministic* as_deterministic() const noexcept;
  const Product* as_product() const noexcept;
  const SharedFactor* as_shared_factor() const noexcept;

 private:
  Fading() = default;

  Kind kind_ = Kind::deterministic;
  Lognormal lognormal_;
  Exponential exponential_;
  Deterministic deterministic_;
  std::shared_ptr<const Product> product_;
  SharedFactor shared_;
};

// The i.i.d. per-point law that remains once the replication-level common
// factor has been drawn: S_i = scale * X_i with X_i ~ law.
class FadingRealization {
 public:
  FadingRealization(std::shared_ptr<const Fading> law, double scale);

  const Fading& law() const noexcept { return *law_; }
  double scale() const noexcept { return scale_; }

  double sample(Rng& rng) const { return scale_ * law_->sample(rng); }
  double tail(double s) const { return law_->tail(s / scale_); }
  bool has_conditional_sampler() const noexcept { return law_->has_conditional_sampler(); }
  double sample_conditional(double u, Rng& rng) const {
    return scale_ * law_->sample_conditional(u / scale_, rng);
  }

 private:
  std::shared_ptr<const Fading> law_;
  double scale_;
};

}  // namespace propsim
