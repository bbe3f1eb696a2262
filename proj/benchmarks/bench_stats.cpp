#include <benchmark/benchmark.h>

#include <utility>
#include <vector>

#include "polrhet/annotation.hpp"
#include "polrhet/dates.hpp"
#include "polrhet/econest.hpp"
#include "polrhet/persuasion.hpp"
#include "polrhet/rng.hpp"

using namespace polrhet;

static void BM_FleissKappa(benchmark::State& state) {
  Rng rng(21);
  std::vector<std::vector<int>> counts(size_t(state.range(0)), std::vector<int>(3, 0));
  for (auto& row : counts)
    for (int r = 0; r < 5; ++r) row[rng.uniform_below(3)]++;
  for (auto _ : state) {
    double k = annotation::fleiss_kappa(counts);
    benchmark::DoNotOptimize(k);
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_FleissKappa)->Range(100, 100000);

static void BM_PersuasionSweep(benchmark::State& state) {
  persuasion::PersuasionInputs in;
  in.effect = 0.022;
  in.y_control = 0.16;
  in.e_treat = 0.32;
  in.e_control = 0;
  std::vector<double> grid(size_t(state.range(0)));
  for (size_t i = 0; i < grid.size(); ++i) grid[i] = 1.0 - 0.99 * double(i) / double(grid.size());
  for (auto _ : state) {
    auto sweep = persuasion::persuasion_sweep(in, grid);
    benchmark::DoNotOptimize(sweep.data());
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_PersuasionSweep)->Range(64, 4096);

static void BM_Rdd(benchmark::State& state) {
  Rng rng(4);
  const Date cutoff{2017, 1, 20};
  const int64_t cut_day = days_from_civil(cutoff);
  std::vector<std::pair<Date, double>> series;
  for (int t = -int(state.range(0)); t <= int(state.range(0)); ++t)
    series.emplace_back(civil_from_days(cut_day + t),
                        0.5 + 0.001 * t + (t >= 0 ? 0.05 : 0.0) + rng.normal(0, 0.02));
  for (auto _ : state) {
    auto res = econest::rdd(series, cutoff, int(state.range(0)), 1);
    benchmark::DoNotOptimize(res.jump);
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(series.size()));
}
BENCHMARK(BM_Rdd)->Arg(90)->Arg(365);
