#include "propsim/fading.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "propsim/error.hpp"
#include "propsim/numeric.hpp"

namespace propsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ParameterError(std::string(name) + " must be positive and finite");
  }
}

double standard_normal(Rng& rng) {
  std::normal_distribution<double> normal;
  return normal(rng);
}

double standard_exponential(Rng& rng) { return -std::log(uniform_open0(rng)); }

// Z | Z >= z0 for a standard normal Z.
double normal_above(double z0, Rng& rng) {
  if (z0 < -5.0) {
    for (;;) {
      const double z = standard_normal(rng);
      if (z >= z0) return z;
    }
  }
  if (z0 > 5.0) {
    // Exponential proposal for the excess, accepted with exp(-x^2 / 2).
    for (;;) {
      const double x = standard_exponential(rng) / z0;
      if (uniform01(rng) <= std::exp(-0.5 * x * x)) return z0 + x;
    }
  }
  const double q = normal_sf(z0);
  return std::max(z0, normal_isf(uniform_open0(rng) * q));
}

double exp_checked(double x, const char* what) {
  if (x > 709.0) throw NumericError(std::string(what) + " overflows double precision");
  return std::exp(x);
}

double product_tail(double scale, std::span<const Fading> factors, double s);
double product_expect(double scale, std::span<const Fading> factors,
                      const std::function<double(double)>& f, std::span<const double> kinks,
                      double rel_tol);

double product_tail(double scale, std::span<const Fading> factors, double s) {
  if (factors.empty()) return s <= scale ? 1.0 : 0.0;
  const Fading& first = factors.front();
  if (factors.size() == 1) return first.tail(s / scale);
  return product_expect(1.0, factors.subspan(1),
                        [&](double x) { return first.tail(s / (scale * x)); }, {}, 1e-12);
}

double product_expect(double scale, std::span<const Fading> factors,
                      const std::function<double(double)>& f, std::span<const double> kinks,
                      double rel_tol) {
  if (factors.empty()) return f(scale);
  const Fading& first = factors.front();
  if (factors.size() == 1) {
    std::vector<double> scaled(kinks.begin(), kinks.end());
    for (double& k : scaled) k /= scale;
    return first.expect([&](double x) { return f(scale * x); }, scaled, rel_tol);
  }
  const auto rest = factors.subspan(1);
  // An outer rule cannot resolve more digits than its inner quadratures carry.
  const double outer_tol = std::min(1e-3, rel_tol * std::pow(1e3, static_cast<double>(rest.size())));
  return first.expect(
      [&](double x) {
        std::vector<double> inner(kinks.begin(), kinks.end());
        for (double& k : inner) k /= scale * x;
        return product_expect(scale * x, rest, f, inner, rel_tol);
      },
      {}, outer_tol);
}

std::vector<Fading> shared_as_factors(const SharedFactor& shared) {
  return {*shared.idiosyncratic, *shared.common};
}

}  // namespace

Fading Fading::lognormal(double sigma, double beta) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("lognormal sigma must be non-negative and finite");
  }
  require_positive(beta, "lognormal beta");
  Fading f;
  f.kind_ = Kind::lognormal;
  f.lognormal_ = {sigma, beta};
  return f;
}

Fading Fading::exponential(double rate) {
  require_positive(rate, "exponential rate");
  Fading f;
  f.kind_ = Kind::exponential;
  f.exponential_ = {rate};
  return f;
}

Fading Fading::deterministic(double value) {
  require_positive(value, "deterministic fading value");
  Fading f;
  f.kind_ = Kind::deterministic;
  f.deterministic_ = {value};
  return f;
}

Fading Fading::product(std::vector<Fading> components) {
  auto p = std::make_shared<Product>();
  for (const Fading& c : components) {
    switch (c.kind_) {
      case Kind::deterministic:
        p->scale *= c.deterministic_.value;
        break;
      case Kind::product:
        p->scale *= c.product_->scale;
        p->factors.insert(p->factors.end(), c.product_->factors.begin(), c.product_->factors.end());
        break;
      case Kind::shared_factor:
        throw ParameterError("a shared-factor model cannot be a product component");
      default:
        p->factors.push_back(c);
    }
  }
  require_positive(p->scale, "product scale");
  Fading f;
  f.kind_ = Kind::product;
  f.product_ = std::move(p);
  return f;
}

Fading Fading::shared_factor(Fading idiosyncratic, Fading common) {
  if (idiosyncratic.kind_ == Kind::shared_factor || common.kind_ == Kind::shared_factor) {
    throw ParameterError("shared-factor components cannot themselves be shared");
  }
  Fading f;
  f.kind_ = Kind::shared_factor;
  f.shared_.idiosyncratic = std::make_shared<const Fading>(std::move(idiosyncratic));
  f.shared_.common = std::make_shared<const Fading>(std::move(common));
  return f;
}

Fading Fading::suzuki(double sigma, double beta) {
  require_positive(beta, "suzuki beta");
  const double rate = std::pow(std::tgamma(1.0 + 2.0 / beta), beta / 2.0);
  return product({lognormal(sigma, beta), exponential(rate)});
}

std::string Fading::kind_name() const {
  switch (kind_) {
    case Kind::lognormal:
      return "lognormal";
    case Kind::exponential:
      return "exponential";
    case Kind::deterministic:
      return "deterministic";
    case Kind::product:
      return "product";
    case Kind::shared_factor:
      return "shared_factor";
  }
  return "unknown";
}

double Fading::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::lognormal: {
      const auto& m = lognormal_;
      if (m.sigma == 0.0) return 1.0;
      return std::exp(m.sigma * standard_normal(rng) - m.sigma * m.sigma / m.beta);
    }
    case Kind::exponential:
      return standard_exponential(rng) / exponential_.rate;
    case Kind::deterministic:
      return deterministic_.value;
    case Kind::product: {
      double s = product_->scale;
      for (const Fading& f : product_->factors) s *= f.sample(rng);
      return s;
    }
    case Kind::shared_factor: {
      const double common = shared_.common->sample(rng);
      return common * shared_.idiosyncratic->sample(rng);
    }
  }
  return 1.0;
}

double Fading::sample(std::uint64_t seed) const {
  Rng rng = make_rng(seed);
  return sample(rng);
}

std::vector<double> Fading::sample_batch(std::size_t n, Rng& rng) const {
  const FadingRealization realization = realize(rng);
  std::vector<double> out(n);
  for (double& s : out) s = realization.sample(rng);
  return out;
}

FadingRealization Fading::realize(Rng& rng) const {
  if (kind_ == Kind::shared_factor) {
    return FadingRealization(shared_.idiosyncratic, shared_.common->sample(rng));
  }
  return FadingRealization(std::make_shared<const Fading>(*this), 1.0);
}

double Fading::tail(double s) const {
  if (!(s > 0.0)) throw DomainError("fading tail is defined for s > 0 only");
  switch (kind_) {
    case Kind::lognormal: {
      const auto& m = lognormal_;
      if (m.sigma == 0.0) return s <= 1.0 ? 1.0 : 0.0;
      return normal_sf((std::log(s) + m.sigma * m.sigma / m.beta) / m.sigma);
    }
    case Kind::exponential:
      return std::exp(-exponential_.rate * s);
    case Kind::deterministic:
      return s <= deterministic_.value ? 1.0 : 0.0;
    case Kind::product:
      return product_tail(product_->scale, product_->factors, s);
    case Kind::shared_factor: {
      const auto factors = shared_as_factors(shared_);
      return product_tail(1.0, factors, s);
    }
  }
  return 0.0;
}

double Fading::fractional_moment(double p) const {
  if (!(p > 0.0) || !std::isfinite(p)) throw ParameterError("moment order must be positive");
  switch (kind_) {
    case Kind::lognormal: {
      const auto& m = lognormal_;
      if (p == 2.0 / m.beta) return 1.0;
      const double s2 = m.sigma * m.sigma;
      return exp_checked(0.5 * p * p * s2 - p * s2 / m.beta, "lognormal moment");
    }
    case Kind::exponential:
      return exp_checked(std::lgamma(1.0 + p) - p * std::log(exponential_.rate),
                         "exponential moment");
    case Kind::deterministic:
      return exp_checked(p * std::log(deterministic_.value), "deterministic moment");
    case Kind::product: {
      double m = exp_checked(p * std::log(product_->scale), "product moment");
      for (const Fading& f : product_->factors) {
        const double fm = f.fractional_moment(p);
        if (std::isinf(fm)) return kInf;
        m *= fm;
      }
      if (std::isinf(m)) throw NumericError("product moment overflows double precision");
      return m;
    }
    case Kind::shared_factor: {
      const double a = shared_.idiosyncratic->fractional_moment(p);
      const double b = shared_.common->fractional_moment(p);
      if (std::isinf(a) || std::isinf(b)) return kInf;
      const double m = a * b;
      if (std::isinf(m)) throw NumericError("shared-factor moment overflows double precision");
      return m;
    }
  }
  return kInf;
}

double Fading::expect(const std::function<double(double)>& f, std::span<const double> kinks,
                      double rel_tol) const {
  switch (kind_) {
    case Kind::lognormal: {
      const auto& m = lognormal_;
      if (m.sigma == 0.0) return f(1.0);
      const double shift = m.sigma * m.sigma / m.beta;
      const double half_width = 12.0 + 3.0 * m.sigma;
      std::vector<double> zk;
      for (double k : kinks) {
        if (k > 0.0) zk.push_back((std::log(k) + shift) / m.sigma);
      }
      const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
      return integrate_piecewise(
          [&](double z) {
            const double w = norm * std::exp(-0.5 * z * z);
            if (w == 0.0) return 0.0;
            return w * f(std::exp(m.sigma * z - shift));
          },
          -half_width, half_width, zk, rel_tol);
    }
    case Kind::exponential: {
      const double mu = exponential_.rate;
      std::vector<double> vk;
      for (double k : kinks) {
        if (k > 0.0) vk.push_back(std::log(mu * k));
      }
      // E = e^v has density exp(v - e^v) in v.
      return integrate_piecewise(
          [&](double v) {
            const double e = std::exp(v);
            const double w = std::exp(v - e);
            if (w == 0.0) return 0.0;
            return w * f(e / mu);
          },
          -60.0, std::log(750.0), vk, rel_tol);
    }
    case Kind::deterministic:
      return f(deterministic_.value);
    case Kind::product:
      return product_expect(product_->scale, product_->factors, f, kinks, rel_tol);
    case Kind::shared_factor: {
      const auto factors = shared_as_factors(shared_);
      return product_expect(1.0, factors, f, kinks, rel_tol);
    }
  }
  return 0.0;
}

bool Fading::has_conditional_sampler() const noexcept {
  switch (kind_) {
    case Kind::product:
      return product_->factors.size() <= 1 &&
             (product_->factors.empty() || product_->factors.front().has_conditional_sampler());
    case Kind::shared_factor:
      return false;
    default:
      return true;
  }
}

double Fading::sample_conditional(double u, Rng& rng) const {
  switch (kind_) {
    case Kind::lognormal: {
      const auto& m = lognormal_;
      if (m.sigma == 0.0) return 1.0;
      if (!(u > 0.0)) return sample(rng);
      const double shift = m.sigma * m.sigma / m.beta;
      const double z0 = (std::log(u) + shift) / m.sigma;
      const double z = normal_above(z0, rng);
      return std::max(u, std::exp(m.sigma * z - shift));
    }
    case Kind::exponential:
      return std::max(u, 0.0) + standard_exponential(rng) / exponential_.rate;
    case Kind::deterministic:
      return deterministic_.value;
    case Kind::product: {
      const auto& p = *product_;
      if (p.factors.empty()) return p.scale;
      if (p.factors.size() == 1) return p.scale * p.factors.front().sample_conditional(u / p.scale, rng);
      throw UnsupportedError("conditional sampling of a product of independent random factors");
    }
    case Kind::shared_factor:
      throw UnsupportedError("conditional sampling needs a realized common factor");
  }
  return 0.0;
}

Fading Fading::with_sigma(double sigma) const {
  switch (kind_) {
    case Kind::lognormal:
      return lognormal(sigma, lognormal_.beta);
    case Kind::product: {
      std::vector<Fading> parts{deterministic(product_->scale)};
      for (const Fading& f : product_->factors) parts.push_back(f.with_sigma(sigma));
      return product(std::move(parts));
    }
    case Kind::shared_factor:
      return shared_factor(shared_.idiosyncratic->with_sigma(sigma),
                           shared_.common->with_sigma(sigma));
    default:
      return *this;
  }
}

const Lognormal* Fading::as_lognormal() const noexcept {
  return kind_ == Kind::lognormal ? &lognormal_ : nullptr;
}
const Exponential* Fading::as_exponential() const noexcept {
  return kind_ == Kind::exponential ? &exponential_ : nullptr;
}
const Deterministic* Fading::as_deterministic() const noexcept {
  return kind_ == Kind::deterministic ? &deterministic_ : nullptr;
}
const Product* Fading::as_product() const noexcept {
  return kind_ == Kind::product ? product_.get() : nullptr;
}
const SharedFactor* Fading::as_shared_factor() const noexcept {
  return kind_ == Kind::shared_factor ? &shared_ : nullptr;
}

FadingRealization::FadingRealization(std::shared_ptr<const Fading> law, double scale)
    : law_(std::move(law)), scale_(scale) {
  if (!law_) throw ParameterError("fading realization needs a law");
  require_positive(scale_, "fading realization scale");
}

}  // namespace propsim
