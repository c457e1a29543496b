#include <benchmark/benchmark.h>

#include "matchkit/cartpole.hpp"
#include "matchkit/matching.hpp"
#include "matchkit/sim.hpp"

namespace {

using namespace matchkit;

SweepConfig sweep_config() {
  SweepConfig cfg;
  cfg.ctrl = CartpoleController::paper_defaults();
  cfg.t_max = 5.0;
  return cfg;
}

SweepGrid sweep_grid(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  return SweepGrid{{-1.5, 1.5, n}, {-1.5, 1.5, n}};
}

void BM_SweepParallel(benchmark::State& state) {
  const SweepConfig cfg = sweep_config();
  const SweepGrid grid = sweep_grid(state);
  for (auto _ : state) benchmark::DoNotOptimize(sweep(cfg, grid));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(grid.size()));
}

void BM_SweepSerial(benchmark::State& state) {
  const SweepConfig cfg = sweep_config();
  const SweepGrid grid = sweep_grid(state);
  for (auto _ : state) benchmark::DoNotOptimize(sweep_serial(cfg, grid));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(grid.size()));
}

CharacteristicData characteristic_data() {
  const CartpoleController c = CartpoleController::paper_defaults();
  CharacteristicData data;
  data.section = CartSection::constant(c.sigma0, c.mu0);
  data.h = [c](double) { return 1.0 / c.sigma0 + c.r; };
  data.w = [c](double z) { return 0.5 * c.w1 * z * z; };
  return data;
}

void BM_CharacteristicsParallel(benchmark::State& state) {
  const CharacteristicData data = characteristic_data();
  const int n = static_cast<int>(state.range(0));
  const CharacteristicGrid grid{-1.2, 1.2, n, -2.0, 2.0, n};
  for (auto _ : state) benchmark::DoNotOptimize(solve_characteristics(data, 0.188, grid));
}

void BM_CharacteristicsSerial(benchmark::State& state) {
  const CharacteristicData data = characteristic_data();
  const int n = static_cast<int>(state.range(0));
  const CharacteristicGrid grid{-1.2, 1.2, n, -2.0, 2.0, n};
  for (auto _ : state) benchmark::DoNotOptimize(solve_characteristics_serial(data, 0.188, grid));
}

}  // namespace

BENCHMARK(BM_SweepParallel)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CharacteristicsParallel)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CharacteristicsSerial)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
