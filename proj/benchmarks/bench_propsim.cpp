#include <benchmark/benchmark.h>

#include <cstdint>

#include "propsim/fading.hpp"
#include "propsim/geometry.hpp"
#include "propsim/mean_measure.hpp"
#include "propsim/path_loss.hpp"
#include "propsim/poisson_approx.hpp"
#include "propsim/propagation.hpp"
#include "propsim/simulate.hpp"

using namespace propsim;

namespace {

const PathLoss kPowerLaw = PathLoss::power_law(1.0, 4.0);

void BM_LognormalTail(benchmark::State& state) {
  const Fading f = Fading::lognormal(4.0, 4.0);
  double x = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.tail(x));
    x = x < 100.0 ? x * 1.01 : 0.5;
  }
}
BENCHMARK(BM_LognormalTail);

void BM_MultiSlopeInverse(benchmark::State& state) {
  const PathLoss pl = PathLoss::multi_slope({1.0, 10.0}, {2.0, 3.0, 4.0}, 1.0);
  double y = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pl.inverse(y));
    y = y < 1e6 ? y * 1.1 : 0.01;
  }
}
BENCHMARK(BM_MultiSlopeInverse);

void BM_GeneratePropagation(benchmark::State& state) {
  const PointPattern2D p = make_lattice(LatticeKind::square, 1.0, static_cast<double>(state.range(0)));
  const Fading f = Fading::lognormal(2.0, 4.0);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate(p, kPowerLaw, f, seed++));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.size()));
}
BENCHMARK(BM_GeneratePropagation)->Arg(10)->Arg(50);

void BM_SimulatorReplication(benchmark::State& state) {
  const Fading f = Fading::lognormal(static_cast<double>(state.range(0)), 4.0);
  const RestrictedSimulator lattice(LatticeSource{LatticeKind::square, 1.0}, kPowerLaw, f, 1.0);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(lattice.simulate(seed++));
}
BENCHMARK(BM_SimulatorReplication)->Arg(1)->Arg(4)->Arg(8);

void BM_GinibreSimulatorReplication(benchmark::State& state) {
  const GinibreParams gp{0.5, 1.0};
  const Fading f = Fading::lognormal(6.0, 4.0);
  const double tau = 16.0;
  const RestrictedSimulator sim(GinibreSource{gp, suggest_r_max(kPowerLaw, f, tau, 1e-6)}, kPowerLaw, f,
                                tau);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sim.simulate(seed++));
}
BENCHMARK(BM_GinibreSimulatorReplication)->Unit(benchmark::kMicrosecond);

void BM_GinibreExact(benchmark::State& state) {
  const GinibreParams gp{0.5, 1.0};
  const double r = static_cast<double>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_alpha_ginibre(gp, r, seed++));
}
BENCHMARK(BM_GinibreExact)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_GinibreRadial(benchmark::State& state) {
  const GinibreParams gp{0.5, 1.0};
  const double r = static_cast<double>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_alpha_ginibre_radial(gp, r, seed++));
}
BENCHMARK(BM_GinibreRadial)->Arg(4)->Arg(8)->Arg(32);

void BM_IntensityMean(benchmark::State& state) {
  const Fading f = Fading::lognormal(2.0, 4.0);
  const GrowthFunction g = GrowthFunction::lattice(LatticeKind::hexagonal, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(intensity_mean(g, kPowerLaw, f, 3.0));
}
BENCHMARK(BM_IntensityMean)->Unit(benchmark::kMicrosecond);

void BM_TvBoundsLattice(benchmark::State& state) {
  const Fading f = Fading::lognormal(4.0, 4.0);
  const RestrictedSimulator sim(LatticeSource{LatticeKind::square, 1.0}, kPowerLaw, f, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(tv_bounds(sim));
}
BENCHMARK(BM_TvBoundsLattice)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
