// Serial reference loop vs OpenMP replica loop on the same workloads.

#include <benchmark/benchmark.h>

#include "hslg/limit_samplers.hpp"
#include "hslg/parallel.hpp"
#include "hslg/polymer.hpp"

namespace {

void bw_pairs(benchmark::State& state, hslg::Execution ex) {
  const auto replicas = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto out = hslg::map_replicas(
        replicas,
        [](std::size_t i) {
          hslg::RngState rng(7, i);
          return hslg::polymer::sample_bw_identity_pair(rng, 2.0, 0.5, 4, 3).first;
        },
        ex);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(replicas));
}

void line_ensembles(benchmark::State& state, hslg::Execution ex) {
  const auto replicas = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto out = hslg::map_replicas(
        replicas,
        [](std::size_t i) {
          hslg::RngState rng(9, i);
          const auto env = hslg::build_half_env(rng, 20, 2.5, 0.3);
          return hslg::polymer::hslg_line_ensemble(env, 10).value(3, 1);
        },
        ex);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(replicas));
}

void positive_bridges(benchmark::State& state, hslg::Execution ex) {
  const auto replicas = static_cast<std::size_t>(state.range(0));
  const auto grid = hslg::limits::uniform_grid(-1.0, 64);
  for (auto _ : state) {
    auto out = hslg::map_replicas(
        replicas,
        [&](std::size_t i) {
          hslg::RngState rng(11, i);
          return hslg::limits::sample_lambda_plus(rng, -1.0, 1.0, grid)[32];
        },
        ex);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(replicas));
}

}  // namespace

BENCHMARK_CAPTURE(bw_pairs, serial, hslg::Execution::serial)->Arg(2000)->UseRealTime();
BENCHMARK_CAPTURE(bw_pairs, openmp, hslg::Execution::parallel)->Arg(2000)->UseRealTime();
BENCHMARK_CAPTURE(line_ensembles, serial, hslg::Execution::serial)->Arg(64)->UseRealTime();
BENCHMARK_CAPTURE(line_ensembles, openmp, hslg::Execution::parallel)->Arg(64)->UseRealTime();

BENCHMARK_CAPTURE(positive_bridges, serial, hslg::Execution::serial)->Arg(200)->UseRealTime();
BENCHMARK_CAPTURE(positive_bridges, openmp, hslg::Execution::parallel)->Arg(200)->UseRealTime();

BENCHMARK_MAIN();
