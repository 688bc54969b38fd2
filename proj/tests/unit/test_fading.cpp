#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "propsim/error.hpp"
#include "propsim/fading.hpp"
#include "propsim/numeric.hpp"
#include "propsim/random.hpp"

using namespace propsim;

namespace {

RunningStats moments(const Fading& f, std::size_t n, std::uint64_t seed, double power) {
  Rng rng = make_rng(seed);
  RunningStats s;
  for (std::size_t i = 0; i < n; ++i) s.push(std::pow(f.sample(rng), power));
  return s;
}

}  // namespace

TEST(FadingSample, Deterministic) {
  Rng rng = make_rng(1);
  EXPECT_EQ(Fading::deterministic(3.0).sample(rng), 3.0);
}

TEST(FadingSample, LognormalUnitFractionalMean) {
  const RunningStats s = moments(Fading::lognormal(2.0, 4.0), 1000000, 11, 0.5);
  EXPECT_NEAR(s.mean(), 1.0, 0.01);
}

TEST(FadingSample, ExponentialWithUnitRate) {
  // beta = 2 gives rate Gamma(2)^1 = 1.
  const RunningStats s = moments(Fading::exponential(std::tgamma(2.0)), 1000000, 12, 1.0);
  EXPECT_NEAR(s.mean(), 1.0, 0.01);
}

TEST(FadingSample, SameSeedSameDraws) {
  const Fading f = Fading::suzuki(2.0, 4.0);
  EXPECT_EQ(f.sample(std::uint64_t{77}), f.sample(std::uint64_t{77}));
}

TEST(FadingTail, Examples) {
  EXPECT_NEAR(Fading::lognormal(2.0, 4.0).tail(1.0), 0.3085375387259869, 1e-12);
  EXPECT_NEAR(Fading::exponential(1.0).tail(std::log(2.0)), 0.5, 1e-15);
  EXPECT_EQ(Fading::deterministic(1.0).tail(2.0), 0.0);
  EXPECT_EQ(Fading::deterministic(1.0).tail(1.0), 1.0);
  EXPECT_THROW(Fading::exponential(1.0).tail(0.0), DomainError);
}

TEST(FadingTail, NonincreasingWithinUnitInterval) {
  const Fading models[] = {
      Fading::lognormal(3.0, 4.0),
      Fading::exponential(0.7),
      Fading::suzuki(1.5, 3.0),
      Fading::product({Fading::lognormal(1.0, 4.0), Fading::lognormal(0.5, 4.0)}),
      Fading::shared_factor(Fading::exponential(1.0), Fading::lognormal(1.0, 4.0)),
  };
  for (const Fading& f : models) {
    double previous = 1.0;
    for (int i = 0; i <= 200; ++i) {
      const double s = std::pow(10.0, -6.0 + 14.0 * i / 200.0);
      const double q = f.tail(s);
      EXPECT_GE(q, 0.0);
      EXPECT_LE(q, previous + 1e-12) << f.kind_name() << " s = " << s;
      previous = q;
    }
    EXPECT_LT(previous, 1e-6) << f.kind_name();
  }
}

TEST(FadingTail, ProductMatchesMonteCarlo) {
  const Fading f = Fading::product({Fading::lognormal(1.0, 4.0), Fading::exponential(2.0)});
  Rng rng = make_rng(5);
  const std::size_t n = 200000;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) hits += f.sample(rng) >= 0.8 ? 1 : 0;
  const double p = static_cast<double>(hits) / n;
  EXPECT_NEAR(f.tail(0.8), p, 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST(FadingMoment, Examples) {
  EXPECT_NEAR(Fading::lognormal(3.0, 4.0).fractional_moment(0.5), 1.0, 1e-12);
  EXPECT_NEAR(Fading::exponential(1.0).fractional_moment(1.0), 1.0, 1e-12);
  EXPECT_NEAR(Fading::lognormal(1.0, 4.0).fractional_moment(1.0), std::exp(0.5 - 0.25), 1e-12);
  // Gamma(1 + p) / mu^p.
  EXPECT_NEAR(Fading::exponential(2.0).fractional_moment(0.5), std::tgamma(1.5) / std::sqrt(2.0),
              1e-12);
}

TEST(FadingMoment, SuzukiKeepsUnitMoment) {
  for (double beta : {2.0, 3.0, 4.0}) {
    EXPECT_NEAR(Fading::suzuki(2.0, beta).fractional_moment(2.0 / beta), 1.0, 1e-10);
  }
}

TEST(FadingExpect, AgreesWithMoments) {
  const Fading ln = Fading::lognormal(2.0, 4.0);
  EXPECT_NEAR(ln.expect([](double s) { return std::sqrt(s); }), 1.0, 1e-9);
  const Fading ex = Fading::exponential(2.0);
  EXPECT_NEAR(ex.expect([](double s) { return s; }), 0.5, 1e-12);
  const Fading prod = Fading::product({Fading::exponential(1.0), Fading::exponential(1.0)});
  EXPECT_NEAR(prod.expect([](double s) { return s; }), 1.0, 1e-6);
}

TEST(FadingConditional, ExponentialIsMemoryless) {
  const Fading f = Fading::exponential(1.5);
  ASSERT_TRUE(f.has_conditional_sampler());
  Rng rng = make_rng(21);
  RunningStats excess;
  for (int i = 0; i < 100000; ++i) {
    const double s = f.sample_conditional(2.0, rng);
    ASSERT_GE(s, 2.0);
    excess.push(s - 2.0);
  }
  EXPECT_NEAR(excess.mean(), 1.0 / 1.5, 4.0 * excess.std_error());
}

TEST(FadingConditional, LognormalConditionalTail) {
  const Fading f = Fading::lognormal(2.0, 4.0);
  Rng rng = make_rng(22);
  const double u = 3.0;
  const double v = 10.0;
  const std::size_t n = 100000;
  std::size_t above = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = f.sample_conditional(u, rng);
    ASSERT_GE(s, u);
    above += s >= v ? 1 : 0;
  }
  const double target = f.tail(v) / f.tail(u);
  const double p = static_cast<double>(above) / n;
  EXPECT_NEAR(p, target, 4.0 * std::sqrt(target * (1 - target) / n));
}

TEST(FadingShared, RealizationScalesIdiosyncraticLaw) {
  const Fading f = Fading::shared_factor(Fading::exponential(1.0), Fading::deterministic(2.0));
  Rng rng = make_rng(3);
  const FadingRealization fr = f.realize(rng);
  EXPECT_DOUBLE_EQ(fr.scale(), 2.0);
  EXPECT_NEAR(fr.tail(2.0), std::exp(-1.0), 1e-15);
}

TEST(FadingShared, BatchSharesOneCommonDraw) {
  // Idiosyncratic part deterministic: every draw in a batch equals the common draw.
  const Fading f = Fading::shared_factor(Fading::deterministic(1.0), Fading::lognormal(1.0, 4.0));
  Rng rng = make_rng(4);
  const std::vector<double> batch = f.sample_batch(50, rng);
  for (double s : batch) EXPECT_EQ(s, batch.front());
  const std::vector<double> other = f.sample_batch(50, rng);
  EXPECT_NE(other.front(), batch.front());
}

TEST(FadingShared, MarginalTailIsProductTail) {
  const Fading shared = Fading::shared_factor(Fading::lognormal(1.0, 4.0), Fading::exponential(0.8));
  const Fading iid = Fading::product({Fading::lognormal(1.0, 4.0), Fading::exponential(0.8)});
  for (double s : {0.1, 1.0, 5.0}) EXPECT_NEAR(shared.tail(s), iid.tail(s), 1e-9);
}

TEST(FadingSigma, WithSigmaReplacesEveryLognormal) {
  const Fading f = Fading::suzuki(1.0, 4.0).with_sigma(3.0);
  const Product* p = f.as_product();
  ASSERT_NE(p, nullptr);
  bool found = false;
  for (const Fading& c : p->factors) {
    if (const Lognormal* ln = c.as_lognormal()) {
      EXPECT_EQ(ln->sigma, 3.0);
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(FadingConstruct, RejectsBadParameters) {
  EXPECT_THROW(Fading::lognormal(-1.0, 4.0), ParameterError);
  EXPECT_THROW(Fading::exponential(0.0), ParameterError);
  EXPECT_THROW(Fading::deterministic(0.0), ParameterError);
}
