#include <benchmark/benchmark.h>

#include "slelab/hull.hpp"
#include "slelab/loewner.hpp"
#include "slelab/sde.hpp"
#include "slelab/stats.hpp"

namespace {

using namespace slelab;

SleConfig config(Geometry g, double kappa, double horizon, std::vector<ForceSpec> points = {}) {
  SleConfig cfg;
  cfg.geometry = g;
  cfg.kappa = kappa;
  cfg.horizon = horizon;
  cfg.dt = 1e-3;
  cfg.seed = 1;
  cfg.force_points = std::move(points);
  return cfg;
}

void BM_SampleChordal(benchmark::State& state) {
  const auto cfg = config(Geometry::Chordal, 6.0, static_cast<double>(state.range(0)));
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_driving(cfg, i++));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.steps()));
}
BENCHMARK(BM_SampleChordal)->Arg(1)->Arg(10);

void BM_SampleStripThreePoint(benchmark::State& state) {
  const auto cfg = config(Geometry::Strip, 6.0, 10.0,
                          {ForceSpec::plus_infinity(1.0), ForceSpec::minus_infinity(1.0), ForceSpec::top(0.0, -2.0)});
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_driving(cfg, i++));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.steps()));
}
BENCHMARK(BM_SampleStripThreePoint);

void BM_ForwardMap(benchmark::State& state) {
  const auto s = sample_driving(config(Geometry::Chordal, 6.0, static_cast<double>(state.range(0))));
  const LoewnerChain chain(s.driving);
  for (auto _ : state) benchmark::DoNotOptimize(chain.forward(Complex(0.3, 2.0), s.driving.horizon()));
}
BENCHMARK(BM_ForwardMap)->Arg(1)->Arg(10);

void BM_InverseMap(benchmark::State& state) {
  const auto s = sample_driving(config(static_cast<Geometry>(state.range(0)), 6.0, 1.0));
  const LoewnerChain chain(s.driving);
  for (auto _ : state) benchmark::DoNotOptimize(chain.inverse(Complex(0.3, 0.5), 1.0));
}
BENCHMARK(BM_InverseMap)->Arg(static_cast<int>(Geometry::Chordal))->Arg(static_cast<int>(Geometry::Strip));

void BM_Trace(benchmark::State& state) {
  const auto s = sample_driving(config(Geometry::Chordal, 8.0 / 3.0, 0.5));
  for (auto _ : state) benchmark::DoNotOptimize(trace(s.driving));
}
BENCHMARK(BM_Trace)->Unit(benchmark::kMillisecond);

void BM_HullBoundary(benchmark::State& state) {
  const auto s = sample_driving(config(Geometry::Chordal, 6.0, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(hull_boundary(s.driving, 1.0, 400));
}
BENCHMARK(BM_HullBoundary)->Unit(benchmark::kMillisecond);

void BM_EndpointDensityTable(benchmark::State& state) {
  const DensitySpec spec = DensitySpec::make(6.0, 0.0, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(EndpointDensity(spec));
}
BENCHMARK(BM_EndpointDensityTable)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
