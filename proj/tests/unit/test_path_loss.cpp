#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "propsim/error.hpp"
#include "propsim/path_loss.hpp"

using namespace propsim;

namespace {

const PathLoss kTwoSlope = PathLoss::multi_slope({1.0}, {2.0, 4.0}, 1.0);

}  // namespace

TEST(PathLossEvaluate, PowerLaw) { EXPECT_DOUBLE_EQ(PathLoss::power_law(1.0, 4.0).evaluate(2.0), 16.0); }

TEST(PathLossEvaluate, ExpPowerWithZeroAlphaIsPowerLaw) {
  EXPECT_DOUBLE_EQ(PathLoss::exp_power(0.0, 2.0).evaluate(3.0), 9.0);
}

TEST(PathLossEvaluate, TwoSlopeIsContinuous) {
  EXPECT_DOUBLE_EQ(kTwoSlope.evaluate(0.5), 0.25);
  EXPECT_DOUBLE_EQ(kTwoSlope.evaluate(2.0), 16.0);
  // b_2 = b_1 r_1^(beta_2 - beta_1) = 1.
  EXPECT_DOUBLE_EQ(kTwoSlope.as_multi_slope()->coefficients[1], 1.0);
}

TEST(PathLossEvaluate, NonPositiveRadiusIsDomainError) {
  EXPECT_THROW(PathLoss::power_law(1.0, 4.0).evaluate(0.0), DomainError);
  EXPECT_THROW(kTwoSlope.evaluate(-1.0), DomainError);
}

TEST(PathLossEvaluate, MultiSlopeContinuityAtEveryBreakpoint) {
  const PathLoss ms = PathLoss::multi_slope({0.5, 2.0, 7.0}, {2.0, 3.0, 3.5, 5.0}, 0.7);
  for (double r : ms.as_multi_slope()->breakpoints) {
    const double left = ms.evaluate(std::nextafter(r, 0.0));
    const double at = ms.evaluate(r);
    EXPECT_LE(std::abs(left - at), 1e-12 * at) << "r = " << r;
  }
}

TEST(PathLossInverse, Examples) {
  EXPECT_DOUBLE_EQ(PathLoss::power_law(1.0, 4.0).inverse(16.0), 2.0);
  EXPECT_NEAR(kTwoSlope.inverse(0.25), 0.5, 1e-15);
  EXPECT_NEAR(kTwoSlope.inverse(16.0), 2.0, 1e-15);
  EXPECT_NEAR(PathLoss::exp_power(1.0, 1.0).inverse(std::exp(1.0)), 1.0, 1e-12);
}

TEST(PathLossInverse, NegativeIsDomainError) {
  EXPECT_THROW(PathLoss::power_law(1.0, 4.0).inverse(-1.0), DomainError);
}

TEST(PathLossInverse, RoundTripOnLogGrid) {
  const PathLoss models[] = {
      PathLoss::power_law(1.3, 3.5),
      PathLoss::exp_power(0.2, 2.0),
      PathLoss::exp_power(1e-9, 4.0),
      PathLoss::multi_slope({0.5, 2.0, 7.0}, {2.0, 3.0, 3.5, 5.0}, 0.7),
  };
  for (const PathLoss& pl : models) {
    for (int i = 0; i <= 600; ++i) {
      const double r = std::pow(10.0, -3.0 + 6.0 * i / 600.0);
      const double y = pl.evaluate(r);
      if (!std::isfinite(y)) continue;
      EXPECT_NEAR(pl.inverse(y), r, 1e-10 * r) << pl.kind_name() << " r = " << r;
    }
  }
}

TEST(PathLossInverse, TabulatedStepsFollowInfimumConvention) {
  // h = 1 on (0,1], 2 on (1,3], 4 on (3,5], 8 beyond 5.
  const PathLoss tab = PathLoss::tabulated({1.0, 2.0, 3.0, 5.0}, {1.0, 2.0, 2.0, 4.0, 8.0});
  EXPECT_EQ(tab.evaluate(1.0), 1.0);
  EXPECT_EQ(tab.evaluate(std::nextafter(1.0, 2.0)), 2.0);
  EXPECT_EQ(tab.inverse(0.5), 0.0);
  EXPECT_EQ(tab.inverse(1.0), 1.0);
  EXPECT_EQ(tab.inverse(1.5), 1.0);
  EXPECT_EQ(tab.inverse(2.0), 3.0);
  EXPECT_EQ(tab.inverse(4.0), 5.0);
  EXPECT_TRUE(std::isinf(tab.inverse(8.0)));
}

TEST(PathLossInverse, GeneralizedInverseLawOnTabulatedGrid) {
  const PathLoss tab = PathLoss::tabulated({0.3, 0.9, 1.7, 4.2}, {0.5, 1.0, 1.0, 3.0, 6.0});
  for (int i = 0; i < 300; ++i) {
    const double y = 7.0 * i / 300.0;
    const double inv = tab.inverse(y);
    for (int j = 1; j <= 500; ++j) {
      const double x = 10.0 * j / 500.0;
      if (x < inv) EXPECT_LE(tab.evaluate(x), y);
      if (x > inv) EXPECT_GT(tab.evaluate(x), y);
    }
  }
}

TEST(PathLossInverse, Monotone) {
  const PathLoss ms = PathLoss::multi_slope({1.0, 10.0}, {2.0, 3.0, 4.0}, 1.0);
  double previous = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double y = std::pow(10.0, -4.0 + 12.0 * i / 1000.0);
    const double x = ms.inverse(y);
    EXPECT_GE(x, previous);
    previous = x;
  }
}

TEST(PathLossConstruct, RejectsBadParameters) {
  EXPECT_THROW(PathLoss::power_law(0.0, 4.0), ParameterError);
  EXPECT_THROW(PathLoss::power_law(1.0, -1.0), ParameterError);
  EXPECT_THROW(PathLoss::exp_power(-1.0, 2.0), ParameterError);
  EXPECT_THROW(PathLoss::multi_slope({2.0, 1.0}, {2.0, 3.0, 4.0}, 1.0), ParameterError);
  EXPECT_THROW(PathLoss::multi_slope({1.0}, {2.0}, 1.0), ParameterError);
  EXPECT_THROW(PathLoss::tabulated({1.0}, {2.0, 1.0}), ParameterError);
}

TEST(LambertW, Examples) {
  EXPECT_EQ(lambert_w(0.0), 0.0);
  EXPECT_NEAR(lambert_w(std::exp(1.0)), 1.0, 1e-12);
  EXPECT_NEAR(lambert_w(1.0), 0.5671432904097838, 1e-12);
  EXPECT_THROW(lambert_w(-0.1), DomainError);
}

TEST(LambertW, ResidualAcrossDecades) {
  for (int i = 0; i <= 400; ++i) {
    const double y = std::pow(10.0, -12.0 + 24.0 * i / 400.0);
    const double w = lambert_w(y);
    EXPECT_LE(std::abs(w * std::exp(w) - y), 1e-12 * std::max(1.0, y)) << "y = " << y;
  }
}
