#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

#include "stagrav/energy_momentum.hpp"
#include "stagrav/quadrature.hpp"

using namespace stagrav;

namespace {

const std::vector<double> kMass{1.0};
const Point kPoint{0.0, 10.0, std::numbers::pi / 4, 0.0};

void BM_GeometricProduct(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  Multivector a, b;
  for (unsigned i = 0; i < kBlades; ++i) {
    a[i] = u(rng);
    b[i] = u(rng);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(a = a * b);
    a *= 0.5;
  }
}
BENCHMARK(BM_GeometricProduct);

void BM_FrameJet(benchmark::State& state) {
  const Tetrad T = schwarzschild_tetrad();
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(frame_jet(T, kPoint, kMass, order));
}
BENCHMARK(BM_FrameJet)->Arg(2)->Arg(3);

void BM_GravEmNice(benchmark::State& state) {
  const FrameJet frame = frame_jet(schwarzschild_tetrad(), kPoint, kMass, 2);
  for (auto _ : state) benchmark::DoNotOptimize(grav_em_nice(frame));
}
BENCHMARK(BM_GravEmNice);

void BM_EvaluateReport(benchmark::State& state) {
  const Configuration config{schwarzschild_tetrad(), {}, kMass};
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_report(config, kPoint));
}
BENCHMARK(BM_EvaluateReport)->Unit(benchmark::kMicrosecond);

void BM_ConservationResidual(benchmark::State& state) {
  const Configuration config{schwarzschild_tetrad(), {}, kMass};
  for (auto _ : state) benchmark::DoNotOptimize(conservation_residual(config, kPoint));
}
BENCHMARK(BM_ConservationResidual)->Unit(benchmark::kMicrosecond);

void BM_ExteriorEnergy(benchmark::State& state) {
  const Tetrad T = schwarzschild_tetrad();
  const Region region(T.symbols(), "r", "10");
  for (auto _ : state) benchmark::DoNotOptimize(integrate_energy(T, region, kMass));
}
BENCHMARK(BM_ExteriorEnergy)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace
BENCHMARK_MAIN();
