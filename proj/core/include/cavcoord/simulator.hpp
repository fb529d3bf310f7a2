#pragma once

#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cavcoord/errors.hpp"
#include "cavcoord/exit_window.hpp"
#include "cavcoord/safety.hpp"
#include "cavcoord/scenario.hpp"
#include "cavcoord/scheduler.hpp"

namespace cavcoord {

/// Measured state of one vehicle at a replanning instant.
struct Observation {
  CavId cav_id = 0;
  double tau = 0.0;
  double p_observed = 0.0;
  double v_observed = 0.0;
};

/// True state of `plan` at tau plus independent uniform draws on
/// [-half, +half] per channel, then clamped to [v_min, v_max] and
/// [0, path_length].
Observation observe_state(const CommittedPlan& plan, double tau, const NoiseModel& noise,
                          double path_length, const VehicleLimits& limits,
                          std::mt19937_64& rng);

/// Uniform draw on [0, 1) from the top 53 bits of one generator output.
double unit_draw(std::mt19937_64& rng);

struct PlanRequest {
  CavId cav_id = 0;
  PathId path_id = 0;
  double entry_time = 0.0;
  Observation observation;
  ExitTimeWindow window;
  std::optional<CubicTrajectory> retained;  // current plan, kept when no grid exit time is safe
};

struct PlannerContext {
  const IntersectionGeometry& geometry;
  VehicleLimits limits;
  SafetyParams safety;
  double grid_step = 0.1;
};

/// Earliest grid exit time {lower, lower + step, ..., upper} whose cubic is
/// feasible and safe against `committed`, refined by bisection against the
/// preceding unsafe grid point to kPlannerTolerance. Besides the checks of
/// check_candidate, the nearest committed follower must stay behind the
/// candidate. When no grid
/// point is safe, `retained` is returned if it is.
/// Throws InfeasibleError otherwise.
CommittedPlan plan(const PlanRequest& request, std::span<const CommittedPlan> committed,
                   const PlannerContext& context);

inline constexpr double kPlannerTolerance = 1e-3;  // s

/// Entry gap rule: returns std::nullopt when a vehicle entering at `t` with
/// `entry_speed` keeps gamma + phi * entry_speed behind `last_on_path`, and
/// otherwise the earliest time at which it would.
std::optional<double> entry_deferral(const CommittedPlan* last_on_path, double t,
                                     double entry_speed, const SafetyParams& params);

struct Arrival {
  CavId cav_id = 0;
  PathId path_id = 0;
  double time = 0.0;
  double speed = 0.0;
};

/// Seeded arrival stream of every path, merged by time and numbered from 1.
/// Depends only on the seed, volumes, arrival model, speed range and horizon,
/// so runs that differ only in policy see identical traffic.
std::vector<Arrival> generate_arrivals(const ScenarioConfig& config);

struct VehicleRecord {
  CavId cav_id = 0;
  PathId path_id = 0;
  double path_length = 0.0;
  double arrival_time = 0.0;
  double entry_time = 0.0;
  double entry_speed = 0.0;
  ExitTimeWindow entry_window;
  double weight = 1.0;  // used by the weighted average travel time
  /// Realized motion: each segment is in force from its t_start until the
  /// next segment starts.
  std::vector<CubicTrajectory> segments;
  std::optional<double> exit_time;

  const CubicTrajectory& segment_at(double t) const;
  KinematicState state_at(double t) const;
  double travel_time() const { return exit_time.value_or(entry_time) - entry_time; }
};

struct CommitRecord {
  CavId cav_id = 0;
  Observation observation;
  ExitTimeWindow window;
  double weight = 1.0;
  double processing_time = 0.0;
  CommittedPlan plan;
  double worst_margin = kUnconstrained;
};

enum class RoundTrigger { arrival, timer };

struct ReplanRound {
  double tau = 0.0;
  RoundTrigger trigger = RoundTrigger::arrival;
  DecisionSequence sequence;
  DecisionSequence fcfs;
  double j_chosen = 0.0;
  double j_fcfs = 0.0;
  std::vector<CommittedPlan> held;  // kept plans, cut to start at tau
  std::vector<CommitRecord> commits;  // in planning order
  bool fallback = false;  // planned with pending plans respected
};

struct SimulationLog {
  ScenarioConfig config;
  SequencingPolicy simulated_policy = SequencingPolicy::fcfs;  // fcfs or priority
  std::vector<VehicleRecord> vehicles;                        // by cav id, from 1
  std::vector<ReplanRound> rounds;
  std::vector<nlohmann::json> events;
};

/// Planning failure during a run; carries a dump of the simulation state and
/// the log as it stood when the run stopped.
class PlannerInfeasibleError : public InfeasibleError {
 public:
  PlannerInfeasibleError(const std::string& what, nlohmann::json state,
                         std::shared_ptr<const SimulationLog> partial = nullptr)
      : InfeasibleError(what), state_(std::move(state)), partial_(std::move(partial)) {}
  const nlohmann::json& state() const { return state_; }
  const SimulationLog* partial_log() const { return partial_.get(); }

 private:
  nlohmann::json state_;
  std::shared_ptr<const SimulationLog> partial_;
};

/// Runs `config` to completion (every arrival has entered and exited).
/// best_of_both simulates fcfs and priority on the same seed and keeps the
/// one with the lower average travel time, fcfs on ties.
SimulationLog run(const ScenarioConfig& config);

/// Single simulation under fcfs or priority sequencing.
SimulationLog run_policy(const ScenarioConfig& config, SequencingPolicy policy);

/// Picks between paired fcfs and priority logs as best_of_both does.
SimulationLog select_best_of_both(SimulationLog fcfs, SimulationLog priority);

}  // namespace cavcoord
