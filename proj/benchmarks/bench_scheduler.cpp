#include <benchmark/benchmark.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cavcoord/scheduler.hpp"

using namespace cavcoord;

namespace {

PrecedenceGraph random_graph(std::size_t jobs, std::size_t chains, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> w(1e-3, 10.0), p(1e-3, 100.0);
  chains = std::min(chains, jobs);
  PrecedenceGraph g;
  for (std::size_t c = 0; c < chains; ++c) g.chains.push_back({static_cast<PathId>(c + 1), {}});
  for (std::size_t j = 0; j < jobs; ++j)
    g.chains[j % chains].jobs.push_back({static_cast<CavId>(j + 1), w(rng), p(rng)});
  return g;
}

void BM_Resequence(benchmark::State& state) {
  const auto g = random_graph(static_cast<std::size_t>(state.range(0)),
                              static_cast<std::size_t>(state.range(1)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(resequence(g));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Resequence)
    ->ArgsProduct({benchmark::CreateRange(8, 4096, 4), {4, 12}})
    ->Complexity();

void BM_Fcfs(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<EntryRecord> entries;
  for (int i = 0; i < state.range(0); ++i)
    entries.push_back({static_cast<CavId>(i + 1), std::floor(i / 3.0)});
  for (auto _ : state) benchmark::DoNotOptimize(fcfs_sequence(entries, rng));
}
BENCHMARK(BM_Fcfs)->Range(8, 4096);

void BM_BruteForce(benchmark::State& state) {
  const auto g = random_graph(static_cast<std::size_t>(state.range(0)), 3, 11);
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_optimal(g));
}
BENCHMARK(BM_BruteForce)->DenseRange(4, 8, 2)->Unit(benchmark::kMicrosecond);

}  // namespace
