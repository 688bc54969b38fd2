#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "propsim/error.hpp"
#include "propsim/mean_measure.hpp"
#include "propsim/propagation.hpp"

using namespace propsim;

namespace {

constexpr double kPi = std::numbers::pi;
const PathLoss kTwoSlope = PathLoss::multi_slope({1.0}, {2.0, 4.0}, 1.0);

}  // namespace

TEST(ExactSum, Examples) {
  const PointPattern2D two = PointPattern2D::from_radii({1.0, 2.0}, 2.0);
  EXPECT_NEAR(exact_sum(two, PathLoss::power_law(1.0, 2.0), Fading::exponential(1.0), 4.0),
              std::exp(-0.25) + std::exp(-1.0), 1e-15);
  const PointPattern2D lattice = make_lattice(LatticeKind::square, 1.0, 4.0);
  EXPECT_EQ(exact_sum(lattice, PathLoss::power_law(1.0, 2.0), Fading::deterministic(1.0), 6.0), 20.0);
  EXPECT_EQ(exact_sum(PointPattern2D({}, 1.0), PathLoss::power_law(1.0, 2.0),
                      Fading::exponential(1.0), 1.0),
            0.0);
}

TEST(ConditionalMean, EmptyRealization) {
  EXPECT_EQ(conditional_mean(PointPattern2D({}, 1.0), PathLoss::power_law(1.0, 2.0),
                             Fading::exponential(1.0), 3.0),
            0.0);
}

TEST(ClosedFormPowerLaw, Examples) {
  EXPECT_NEAR(closed_form_power_law(1.0, 1.0, 2.0, Fading::exponential(1.0), 2.0), 2.0 * kPi, 1e-12);
  EXPECT_EQ(closed_form_power_law(1.0, 1.0, 2.0, Fading::exponential(1.0), 0.0), 0.0);
  for (double sigma : {0.5, 2.0, 6.0}) {
    EXPECT_NEAR(closed_form_power_law(1.0, 1.0, 4.0, Fading::lognormal(sigma, 4.0), 1.0), kPi, 1e-12);
  }
}

TEST(ClosedFormPowerLaw, ScalesWithTAndK) {
  const Fading f = Fading::exponential(2.0);
  const double base = closed_form_power_law(2.0, 1.0, 3.0, f, 1.0);
  EXPECT_NEAR(closed_form_power_law(2.0, 1.0, 3.0, f, 8.0), base * 4.0, 1e-12 * base);
  EXPECT_NEAR(closed_form_power_law(2.0, 2.0, 3.0, f, 1.0), base / 4.0, 1e-12 * base);
}

TEST(ClosedFormLambert, Examples) {
  const Fading one = Fading::deterministic(1.0);
  EXPECT_NEAR(closed_form_lambert(1.0, 1.0, 1.0, one, std::exp(1.0)).value, kPi, 1e-12);
  EXPECT_EQ(closed_form_lambert(1.0, 1.0, 1.0, one, 0.0).value, 0.0);
  const Fading ln = Fading::lognormal(1.0, 2.0);
  const double lam = closed_form_lambert(1.0, 1e-9, 4.0, ln, 2.0).value;
  const double pw = closed_form_power_law(1.0, 1.0, 4.0, ln, 2.0);
  EXPECT_LE(std::abs(lam - pw), 1e-6 * pw);
}

TEST(ClosedFormLambert, MonteCarloOptionAgrees) {
  const Fading f = Fading::exponential(1.0);
  const double quad = closed_form_lambert(1.0, 0.5, 3.0, f, 5.0).value;
  const Estimate mc = closed_form_lambert(1.0, 0.5, 3.0, f, 5.0, {200000, 17});
  EXPECT_GT(mc.std_error, 0.0);
  EXPECT_NEAR(mc.value, quad, 4.0 * mc.std_error);
}

TEST(MultiSlopeMean, DirectSubstitution) {
  EXPECT_NEAR(multislope_mean(1.0, kTwoSlope, Fading::deterministic(1.0), 0.25), kPi * 0.25, 1e-12);
  EXPECT_NEAR(multislope_mean(1.0, kTwoSlope, Fading::deterministic(1.0), 16.0), kPi * 4.0, 1e-12);
}

TEST(MultiSlopeMean, EqualsPoissonIntensityMean) {
  const PathLoss ms = PathLoss::multi_slope({1.0, 10.0}, {2.0, 3.0, 4.0}, 1.0);
  const Fading f = Fading::lognormal(1.0, 4.0);
  const GrowthFunction poisson = GrowthFunction::disk_area(1.0);
  for (double t : {0.1, 1.0, 50.0, 1e4}) {
    const double m = multislope_mean(1.0, ms, f, t);
    EXPECT_NEAR(m, intensity_mean(poisson, ms, f, t), 1e-7 * m) << "t = " << t;
  }
}

TEST(MultiSlopeMean, AlternativeConstantsDiffer) {
  const Fading f = Fading::exponential(1.0);
  EXPECT_GT(std::abs(multislope_mean(1.0, kTwoSlope, f, 2.0) -
                     multislope_mean_alternative(1.0, kTwoSlope, f, 2.0)),
            1e-3);
}

TEST(IntensityMean, MatchesPowerLawClosedForm) {
  const Fading f = Fading::lognormal(2.0, 4.0);
  const double closed = closed_form_power_law(0.5, 1.0, 4.0, f, 3.0);
  EXPECT_NEAR(intensity_mean(GrowthFunction::disk_area(0.5), PathLoss::power_law(1.0, 4.0), f, 3.0),
              closed, 1e-8 * closed);
}

TEST(IntensityMean, AnnulusPiecesAddUp) {
  const Fading f = Fading::exponential(1.0);
  const PathLoss pl = PathLoss::power_law(1.0, 3.0);
  const GrowthFunction g = GrowthFunction::lattice(LatticeKind::hexagonal, 1.0);
  const double whole = intensity_mean(g, pl, f, 2.0);
  const double parts = intensity_mean(g, pl, f, 2.0, 0.0, 1.5) + intensity_mean(g, pl, f, 2.0, 1.5);
  EXPECT_NEAR(whole, parts, 1e-9 * whole);
}

TEST(MonteCarloMean, ExampleA) {
  const Estimate e = monte_carlo_mean(GrowthFunction::disk_area(1.0), PathLoss::power_law(1.0, 2.0),
                                      Fading::exponential(1.0), 2.0, 100000, 5);
  EXPECT_NEAR(e.value, 2.0 * kPi, 3.0 * e.std_error);
}

TEST(MonteCarloMean, PatternAgreesWithExactSum) {
  const PathLoss pl = PathLoss::power_law(1.0, 4.0);
  const Fading f = Fading::lognormal(1.0, 4.0);
  const PointPattern2D p = make_lattice(LatticeKind::square, 1.0, suggest_r_max(pl, f, 1.0, 1e-9));
  const Estimate e = monte_carlo_mean(p, pl, f, 1.0, 100000, 6);
  EXPECT_NEAR(e.value, exact_sum(p, pl, f, 1.0), 3.0 * e.std_error);
}

TEST(MonteCarloMean, SmallWindowIsTruncationRisk) {
  const PointPattern2D p = make_lattice(LatticeKind::square, 1.0, 3.0);
  EXPECT_THROW(monte_carlo_mean(p, PathLoss::power_law(1.0, 4.0), Fading::lognormal(2.0, 4.0), 1.0,
                                1000, 7),
               TruncationRiskError);
}

TEST(Tabulate, InterpolatesSmoothMeasures) {
  const Fading f = Fading::lognormal(1.0, 4.0);
  const PathLoss ms = PathLoss::multi_slope({1.0, 10.0}, {2.0, 3.0, 4.0}, 1.0);
  auto m = [&](double t) { return multislope_mean(1.0, ms, f, t); };
  const MeanMeasure tab = MeanMeasure::tabulate(m, 1e-6, 1e3, 257);
  EXPECT_EQ(tab.kind(), MeanMeasure::Kind::tabulated);
  for (double t : {1e-5, 3e-3, 0.7, 11.0, 600.0}) EXPECT_NEAR(tab(t), m(t), 1e-3 * m(t)) << t;
  EXPECT_EQ(tab(2e3), m(2e3));
}

TEST(Tabulate, PowerLawIsReproducedExactlyInLogLog) {
  const MeanMeasure tab = MeanMeasure::tabulate([](double t) { return 3.0 * std::sqrt(t); }, 1e-3, 10.0, 9);
  for (double t : {1e-5, 2e-3, 0.37, 9.9}) EXPECT_NEAR(tab(t), 3.0 * std::sqrt(t), 1e-12 * std::sqrt(t));
}
