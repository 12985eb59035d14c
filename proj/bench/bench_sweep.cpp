// Parallel kernels against their serial references on planted graphs.
#include <benchmark/benchmark.h>
#include <omp.h>

#include "mnsbm/superposition.hpp"
#include "mnsbm/synth.hpp"

namespace {

using namespace mnsbm;

// Planted K = 4 graph on n vertices, S subnetworks, warmed up for a few sweeps.
EnsembleState warm_ensemble(std::size_t n, std::size_t S) {
  Rng rng(42);
  const SyntheticNetwork net = generate(planted_params(n, 4, n / 16), rng);
  EnsembleState ens = make_ensemble(net.graph, {}, S);
  initialize_ensemble(ens, 43);
  for (std::uint64_t t = 0; t < 5; ++t) full_sweep(ens, SweepContext{43, t, 1});
  return ens;
}

int max_workers() { return omp_get_max_threads(); }

void BM_FullSweepParallel(benchmark::State& state) {
  EnsembleState ens = warm_ensemble(state.range(0), state.range(1));
  std::uint64_t t = 100;
  for (auto _ : state) full_sweep(ens, SweepContext{43, t++, max_workers()});
  state.counters["edges"] = static_cast<double>(ens.constrained);
  state.counters["workers"] = max_workers();
}

void BM_FullSweepReference(benchmark::State& state) {
  EnsembleState ens = warm_ensemble(state.range(0), state.range(1));
  std::uint64_t t = 100;
  for (auto _ : state) reference::full_sweep(ens, SweepContext{43, t++, 1});
  state.counters["edges"] = static_cast<double>(ens.constrained);
}

void BM_ResampleEdgesParallel(benchmark::State& state) {
  EnsembleState ens = warm_ensemble(state.range(0), state.range(1));
  std::uint64_t t = 100;
  for (auto _ : state) resample_edges(ens, SweepContext{43, t++, max_workers()});
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ens.dyads.size()));
}

void BM_ResampleEdgesReference(benchmark::State& state) {
  EnsembleState ens = warm_ensemble(state.range(0), state.range(1));
  std::uint64_t t = 100;
  for (auto _ : state) reference::resample_edges(ens, SweepContext{43, t++, 1});
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ens.dyads.size()));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (long n : {64, 256, 512})
    for (long S : {1, 2, 4}) b->Args({n, S});
  b->Unit(benchmark::kMillisecond);
}

BENCHMARK(BM_FullSweepParallel)->Apply(sizes);
BENCHMARK(BM_FullSweepReference)->Apply(sizes);
BENCHMARK(BM_ResampleEdgesParallel)->Apply(sizes);
BENCHMARK(BM_ResampleEdgesReference)->Apply(sizes);

}  // namespace

BENCHMARK_MAIN();
