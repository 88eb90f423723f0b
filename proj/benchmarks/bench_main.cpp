#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mothbench/analysis.hpp"
#include "mothbench/anderson_darling.hpp"
#include "mothbench/navigator.hpp"
#include "mothbench/plume.hpp"
#include "mothbench/segmentation.hpp"

using namespace mothbench;

namespace {

VelocitySeries noise_series(std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed, 7);
  std::normal_distribution<double> g;
  std::vector<Vec3> v(n);
  for (auto& p : v) p = {g(rng), g(rng), g(rng)};
  return VelocitySeries{std::move(v), 2};
}

Trajectory wiggle(std::size_t n, double phase) {
  std::vector<Vec3> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * 0.02;
    v[i] = {2.0 - t, 0.5 + 0.1 * std::sin(6.0 * t + phase), 0.5};
  }
  return Trajectory(std::move(v), 1.0 / 75.0);
}

}  // namespace

static void BM_GaRun(benchmark::State& state) {
  const auto v = noise_series(static_cast<std::size_t>(state.range(0)), 1);
  GAConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ga_run(v, 4, cfg));
  }
}
BENCHMARK(BM_GaRun)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_SegmentVelocity(benchmark::State& state) {
  const auto v = noise_series(static_cast<std::size_t>(state.range(0)), 2);
  GAConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(segment_velocity(v, cfg));
  }
}
BENCHMARK(BM_SegmentVelocity)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_AdvancePlume(benchmark::State& state) {
  WindModel wind;
  wind.disturbed = state.range(0) != 0;
  PlumeState warm;
  Rng rng = make_rng(3);
  for (int i = 0; i < 600; ++i) advance_plume(warm, wind, 1.0 / 75.0, rng);
  for (auto _ : state) {
    PlumeState s = warm;
    advance_plume(s, wind, 1.0 / 75.0, rng);
    benchmark::DoNotOptimize(s.puffs.data());
  }
  state.counters["puffs"] = static_cast<double>(warm.puffs.size());
}
BENCHMARK(BM_AdvancePlume)->Arg(0)->Arg(1);

static void BM_ConcentrationAt(benchmark::State& state) {
  WindModel wind;
  PlumeState s;
  Rng rng = make_rng(4);
  for (int i = 0; i < 600; ++i) advance_plume(s, wind, 1.0 / 75.0, rng);
  const Vec3 probe{1.0, 0.5, 0.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(concentration_at(s, probe));
  }
}
BENCHMARK(BM_ConcentrationAt);

static void BM_RunFlight(benchmark::State& state) {
  const Scenario sc;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_flight(sc, ++seed));
  }
}
BENCHMARK(BM_RunFlight)->Unit(benchmark::kMillisecond);

static void BM_Dtw(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Trajectory a = wiggle(n, 0.0);
  const Trajectory b = wiggle(n + n / 5, 0.4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dtw_mae(a, b));
  }
}
BENCHMARK(BM_Dtw)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_AndersonDarling(benchmark::State& state) {
  Rng rng = make_rng(5);
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> samples(2, std::vector<double>(static_cast<std::size_t>(state.range(0))));
  for (auto& s : samples) {
    for (auto& x : s) x = g(rng);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(ad_k_sample(samples));
  }
}
BENCHMARK(BM_AndersonDarling)->Arg(1000);
BENCHMARK_MAIN();
