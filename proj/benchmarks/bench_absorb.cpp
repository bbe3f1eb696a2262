#include <benchmark/benchmark.h>

#include "polrhet/econest.hpp"
#include "polrhet/synth.hpp"

using namespace polrhet;

// Three-way fixed-effect OLS with cluster-robust errors; range(0) scales the
// unit/group axes, range(1) sets absorption threads.
static void BM_AbsorbOls(benchmark::State& state) {
  synth::PanelDGP dgp;
  dgp.seed = 3;
  dgp.n_units = size_t(state.range(0));
  dgp.n_groups = size_t(state.range(0));
  dgp.n_periods = 24;
  dgp.pairwise_fe = false;
  auto panel = synth::gen_panel(dgp);

  econest::RegressionSpec spec;
  spec.outcome = "y";
  spec.exogenous = {"x1", "x2"};
  spec.fixed_effects = {"unit", "group", "period"};
  spec.cluster = "unit";
  econest::FitOptions opts;
  opts.absorb.threads = int(state.range(1));

  for (auto _ : state) {
    auto fit = econest::ols(spec, panel.table, opts);
    benchmark::DoNotOptimize(fit.coefficients.data());
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(panel.table.n_rows()));
}
BENCHMARK(BM_AbsorbOls)
    ->ArgsProduct({{20, 60, 120}, {1, 4}})
    ->Unit(benchmark::kMillisecond);

// Two-stage least squares on a single-instrument design.
static void BM_Tsls(benchmark::State& state) {
  auto draws = synth::gen_iv_draws(size_t(state.range(0)), 1.0, 0.6, 1.0, 1.0, 5);
  DataTable table(draws.y.size());
  table.add_numeric("y", draws.y);
  table.add_numeric("x", draws.x);
  table.add_numeric("z", draws.z);
  econest::RegressionSpec spec;
  spec.outcome = "y";
  spec.endogenous = {"x"};
  spec.instruments = {"z"};

  for (auto _ : state) {
    auto fit = econest::tsls(spec, table, {});
    benchmark::DoNotOptimize(fit.coefficients.data());
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_Tsls)->Range(1000, 64000)->Unit(benchmark::kMillisecond);
