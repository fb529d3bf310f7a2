#include <benchmark/benchmark.h>

#include <algorithm>
#include <filesystem>

#include "cavcoord/safety.hpp"
#include "cavcoord/scenario.hpp"
#include "cavcoord/simulator.hpp"

using namespace cavcoord;

namespace {

const VehicleLimits kLimits{-3.0, 3.0, 1.0, 20.0};

ScenarioConfig scenario(double volume, double horizon) {
  auto cfg = load_scenario_file(std::filesystem::path(CAVCOORD_DATA_DIR) / "default_scenario.json");
  for (auto& [pid, v] : cfg.volume) v = volume;
  cfg.horizon = horizon;
  cfg.max_cavs.reset();
  return cfg;
}

// The busiest round of a short heavy-traffic run: the last commit is replanned
// against everything held or committed before it.
struct Snapshot {
  ScenarioConfig config;
  PlanRequest request;
  std::vector<CommittedPlan> committed;
  double path_length = 0.0;
};

const Snapshot& snapshot() {
  static const Snapshot s = [] {
    Snapshot out{scenario(2400, 60), {}, {}, 0.0};
    const auto log = run_policy(out.config, SequencingPolicy::priority);
    const auto busiest = std::max_element(
        log.rounds.begin(), log.rounds.end(), [](const auto& a, const auto& b) {
          return a.held.size() + a.commits.size() < b.held.size() + b.commits.size();
        });
    out.committed = busiest->held;
    for (std::size_t k = 0; k + 1 < busiest->commits.size(); ++k)
      out.committed.push_back(busiest->commits[k].plan);
    const auto& last = busiest->commits.back();
    out.request = {last.cav_id, last.plan.path_id, last.plan.entry_time, last.observation,
                   last.window, std::nullopt};
    out.path_length = last.plan.trajectory.position(last.plan.exit_time);
    return out;
  }();
  return s;
}

void BM_ExitTimeWindow(benchmark::State& state) {
  double v0 = 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(exit_time_window(0.0, 0.0, v0, 200.0, kLimits));
    v0 = v0 > 19.0 ? 2.0 : v0 + 0.37;
  }
}
BENCHMARK(BM_ExitTimeWindow);

void BM_SolveCubic(benchmark::State& state) {
  double tf = 10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_cubic(0.0, 0.0, 15.0, tf, 200.0));
    tf = tf > 30.0 ? 10.0 : tf + 0.11;
  }
}
BENCHMARK(BM_SolveCubic);

void BM_CheckCandidate(benchmark::State& state) {
  const auto& s = snapshot();
  const auto& obs = s.request.observation;
  const auto cand =
      solve_cubic(obs.tau, obs.p_observed, obs.v_observed, s.request.window.upper, s.path_length);
  const CandidateChecker checker(s.request.path_id, s.committed, s.config.geometry,
                                 s.config.safety);
  for (auto _ : state) benchmark::DoNotOptimize(checker.check(cand));
  state.counters["committed"] = static_cast<double>(s.committed.size());
}
BENCHMARK(BM_CheckCandidate);

void BM_Plan(benchmark::State& state) {
  const auto& s = snapshot();
  const PlannerContext ctx{s.config.geometry, s.config.limits, s.config.safety,
                           s.config.planner_grid_step};
  for (auto _ : state) {
    try {
      benchmark::DoNotOptimize(plan(s.request, s.committed, ctx));
    } catch (const InfeasibleError&) {
    }
  }
  state.counters["committed"] = static_cast<double>(s.committed.size());
}
BENCHMARK(BM_Plan)->Unit(benchmark::kMicrosecond);

void BM_Run(benchmark::State& state) {
  const auto cfg = scenario(static_cast<double>(state.range(0)), 60);
  for (auto _ : state) benchmark::DoNotOptimize(run_policy(cfg, SequencingPolicy::priority));
}
BENCHMARK(BM_Run)->Arg(800)->Arg(2400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
