#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "propsim/error.hpp"
#include "propsim/numeric.hpp"
#include "propsim/poisson_approx.hpp"
#include "propsim/simulate.hpp"

using namespace propsim;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST(TVBounds, TenPointsAtOneTenth) {
  const std::vector<double> p(10, 0.1);
  const TVBoundReport r = tv_bounds_from_probabilities(p, 1.0);
  EXPECT_NEAR(r.sum_p, 1.0, 1e-15);
  EXPECT_NEAR(r.upper, 0.1, 1e-15);
  EXPECT_NEAR(r.lower, 0.003125, 1e-16);
  EXPECT_NEAR(r.mean_times_max_p, 0.1, 1e-15);
}

TEST(TVBounds, SinglePoint) {
  const double p[] = {0.2};
  const TVBoundReport r = tv_bounds_from_probabilities(p, 1.0);
  EXPECT_NEAR(r.upper, 0.04, 1e-16);
  EXPECT_NEAR(r.lower, 0.00125, 1e-16);
}

TEST(TVBounds, LargeMeanScalesLowerBound) {
  const std::vector<double> p(40, 0.5);  // M = 20
  const TVBoundReport r = tv_bounds_from_probabilities(p, 1.0);
  EXPECT_EQ(r.upper, 1.0);
  EXPECT_NEAR(r.upper_unclipped, 10.0, 1e-12);
  EXPECT_NEAR(r.lower, 10.0 / 20.0 / 32.0, 1e-15);
}

TEST(TVBounds, DeterministicFadingClipsToOne) {
  const PointPattern2D p = PointPattern2D::from_radii({0.5, 0.9, 3.0}, 3.0);
  const TVBoundReport r = tv_bounds(p, PathLoss::power_law(1.0, 2.0), Fading::deterministic(1.0), 1.0,
                                    Window::complete);
  EXPECT_EQ(r.sum_p_sq, 2.0);
  EXPECT_EQ(r.upper, 1.0);
  EXPECT_EQ(r.n_points, 3u);
}

TEST(TVBounds, RejectsInvalidProbabilities) {
  const double bad[] = {0.3, 1.2};
  EXPECT_THROW(tv_bounds_from_probabilities(bad, 1.0), ParameterError);
  const double ok[] = {0.3};
  EXPECT_THROW(tv_bounds_from_probabilities(ok, 0.0), ParameterError);
}

TEST(TVBounds, TruncatedWindowIsGuarded) {
  const PointPattern2D p = make_lattice(LatticeKind::square, 1.0, 3.0);
  try {
    tv_bounds(p, PathLoss::power_law(1.0, 4.0), Fading::lognormal(2.0, 4.0), 1.0);
    FAIL() << "expected TruncationRiskError";
  } catch (const TruncationRiskError& e) {
    EXPECT_GT(e.suggested_r_max(), 3.0);
  }
}

TEST(TVBounds, SimulatorLatticeIncludesFarField) {
  const PathLoss pl = PathLoss::power_law(1.0, 4.0);
  const Fading f = Fading::lognormal(2.0, 4.0);
  const RestrictedSimulator sim(LatticeSource{LatticeKind::square, 1.0}, pl, f, 1.0);
  const TVBoundReport a = tv_bounds(sim);
  const double r = suggest_r_max(pl, f, 1.0, 1e-12);
  const TVBoundReport b = tv_bounds(make_lattice(LatticeKind::square, 1.0, r), pl, f, 1.0);
  EXPECT_NEAR(a.sum_p_sq, b.sum_p_sq, 1e-6 * b.sum_p_sq);
  EXPECT_NEAR(a.sum_p, b.sum_p, 1e-4 * b.sum_p);
  EXPECT_THROW(tv_bounds(RestrictedSimulator(PoissonSource{1.0}, pl, f, 1.0)), ParameterError);
}

TEST(TVBounds, DecreaseWithSigmaOnLattice) {
  const PathLoss pl = PathLoss::power_law(1.0, 4.0);
  double previous = 2.0;
  for (double sigma : {1.0, 2.0, 4.0, 8.0}) {
    const RestrictedSimulator sim(LatticeSource{LatticeKind::square, 1.0}, pl,
                                  Fading::lognormal(sigma, 4.0), 1.0);
    const TVBoundReport r = tv_bounds(sim);
    EXPECT_LT(r.sum_p_sq, previous);
    previous = r.sum_p_sq;
  }
}

TEST(PowerSide, RelabelsWithoutChangingBounds) {
  const std::vector<double> p(10, 0.1);
  const TVBoundReport r = tv_bounds_from_probabilities(p, 4.0);
  const TVBoundReport power = power_side_bounds(r);
  EXPECT_EQ(power.side, TVBoundReport::Side::power);
  EXPECT_EQ(power.upper, r.upper);
  EXPECT_EQ(power.lower, r.lower);
  EXPECT_EQ(power.power_floor, 0.25);
  const TVBoundReport back = power_side_bounds(power);
  EXPECT_EQ(back.side, TVBoundReport::Side::propagation);
  EXPECT_EQ(back.upper, r.upper);
  TVBoundReport inf = r;
  inf.tau = std::numeric_limits<double>::infinity();
  EXPECT_THROW(power_side_bounds(inf), ParameterError);
}

TEST(CoxBound, DeterministicSamplerReducesToSumOfSquares) {
  const PathLoss pl = PathLoss::power_law(1.0, 4.0);
  const Fading f = Fading::exponential(1.0);
  const double tau = 1.0;
  const PointPattern2D p = make_lattice(LatticeKind::square, 1.0, suggest_r_max(pl, f, tau, 1e-13));
  const Estimate e = cox_bound([&](std::uint64_t) { return p; }, pl, f, tau, 100, 1);
  EXPECT_EQ(e.std_error, 0.0);
  EXPECT_NEAR(e.value, tv_bounds(p, pl, f, tau).sum_p_sq, 1e-14);
}

TEST(CoxBound, PoissonMatchesIntensityIntegral) {
  // tau with L(tau) = 1: pi t^(1/2) E S^(1/2) = 1 for lambda = 1, beta = 4.
  const PathLoss pl = PathLoss::power_law(1.0, 4.0);
  const Fading f = Fading::exponential(1.0);
  const double tau = std::pow(1.0 / (kPi * f.fractional_moment(0.5)), 2);
  const double r_max = suggest_r_max(pl, f, tau, 1e-13);
  // Oracle: lambda * integral of 2 pi r p(r)^2 dr, p(r) = exp(-r^4 / tau).
  const double oracle = integrate(
      [&](double r) {
        const double p = std::exp(-std::pow(r, 4) / tau);
        return 2.0 * kPi * r * p * p;
      },
      0.0, r_max);
  const Estimate e = cox_bound([&](std::uint64_t s) { return sample_poisson(1.0, r_max, s); }, pl, f,
                               tau, 20000, 2);
  EXPECT_NEAR(e.value, oracle, 3.0 * e.std_error);
  const RestrictedSimulator sim(PoissonSource{1.0}, pl, f, tau);
  EXPECT_NEAR(sim.sum_p_squared(tau), oracle, 1e-6 * oracle);
}

TEST(CoxBound, HalvedProbabilitiesQuarterTheBound) {
  // Exponential fading with h = r^4: p = exp(-mu r^4 / tau). A transmitter
  // at radius 0.5 with tau chosen so that p = 0.8, then with p = 0.4.
  const PathLoss pl = PathLoss::power_law(1.0, 4.0);
  const Fading f = Fading::exponential(1.0);
  const double h = pl.evaluate(0.5);
  const double tau_full = -h / std::log(0.8);
  const double tau_half = -h / std::log(0.4);
  const PointPattern2D one = PointPattern2D::from_radii({0.5}, suggest_r_max(pl, f, tau_full, 1e-13));
  const auto sampler = [&](std::uint64_t) { return one; };
  const double full = cox_bound(sampler, pl, f, tau_full, 100, 3).value;
  const double half = cox_bound(sampler, pl, f, tau_half, 100, 3).value;
  EXPECT_NEAR(half / full, 0.25, 1e-12);
}

TEST(VarianceRatio, PoissonAtRadiusTen) {
  const double r[] = {10.0};
  const auto v = variance_ratio([](std::uint64_t s) { return sample_poisson(1.0, 10.0, s); }, r, 4000, 4);
  EXPECT_NEAR(v[0].ratio, 1.0 / (100.0 * kPi), 3.0 * v[0].std_error);
}

TEST(VarianceRatio, LatticeIsExactlyZero) {
  const double r[] = {1.0, 5.0, 10.0};
  const PointPattern2D p = make_lattice(LatticeKind::triangular, 1.0, 10.0);
  const auto v = variance_ratio([&](std::uint64_t) { return p; }, r, 1000, 5);
  for (const auto& pt : v) {
    EXPECT_EQ(pt.ratio, 0.0);
    EXPECT_EQ(pt.std_error, 0.0);
  }
}

TEST(VarianceRatio, GinibreBelowPoisson) {
  const double r[] = {2.0, 4.0};
  const GinibreParams gp{0.5, 1.0};
  const auto v = variance_ratio([&](std::uint64_t s) { return sample_alpha_ginibre_radial(gp, 4.0, s); },
                                r, 4000, 6);
  for (const auto& pt : v) EXPECT_LE(pt.ratio, 1.0 / (gp.c * pt.r * pt.r) + 3.0 * pt.std_error);
}

TEST(VarianceRatio, NeedsEnoughReplications) {
  const double r[] = {1.0};
  EXPECT_THROW(variance_ratio([](std::uint64_t s) { return sample_poisson(1.0, 1.0, s); }, r, 10, 1),
               ParameterError);
}
