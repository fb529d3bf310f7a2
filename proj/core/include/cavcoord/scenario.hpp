#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string_view>

#include <nlohmann/json.hpp>

#include "cavcoord/geometry.hpp"
#include "cavcoord/safety.hpp"
#include "cavcoord/trajectory.hpp"

namespace cavcoord {

enum class ArrivalModel { poisson, uniform_headway };
enum class ReplanMode { on_arrival, periodic, both };
enum class SequencingPolicy { fcfs, priority, best_of_both };
enum class WeightMode { inverse_window, uniform };
/// `absolute`: P_i is the earliest feasible exit time itself.
/// `residual`: P_i is that time minus the replanning instant.
enum class ProcessingTimeMode { absolute, residual };

struct NoiseModel {
  double position = 0.0;  // half-range, m
  double speed = 0.0;     // half-range, m/s

  bool enabled() const { return position > 0.0 || speed > 0.0; }
};

struct ScenarioConfig {
  IntersectionGeometry geometry;
  VehicleLimits limits;
  SafetyParams safety;

  std::map<PathId, double> volume;  // veh/h per path
  ArrivalModel arrival_model = ArrivalModel::poisson;
  double entry_speed_min = 12.0;
  double entry_speed_max = 17.0;
  NoiseModel noise;

  ReplanMode replanning = ReplanMode::on_arrival;
  double replan_period = 1.0;  // s, used by periodic and both
  SequencingPolicy policy = SequencingPolicy::priority;
  WeightMode weight_mode = WeightMode::inverse_window;
  ProcessingTimeMode processing_time = ProcessingTimeMode::absolute;

  double horizon = 300.0;            // s, arrivals are generated on [0, horizon)
  std::optional<int> max_cavs;       // cap on the total number of arrivals
  std::uint64_t seed = 0;
  double planner_grid_step = 0.1;    // s
  double output_step = 0.1;          // s, trajectories.csv sampling
  double min_replan_distance = 1.0;  // m, closer to the exit a vehicle keeps its plan

  /// Throws ConfigError on the first violated invariant.
  void validate() const;
};

/// `base_dir` resolves a geometry given as a relative file reference.
ScenarioConfig scenario_from_json(const nlohmann::json& doc,
                                  const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario_file(const std::filesystem::path& file);

nlohmann::json to_json(const ScenarioConfig& config);

std::string_view to_string(ArrivalModel m);
std::string_view to_string(ReplanMode m);
std::string_view to_string(SequencingPolicy p);
std::string_view to_string(WeightMode m);
std::string_view to_string(ProcessingTimeMode m);

/// Throws ConfigError for an unknown name.
SequencingPolicy parse_policy(std::string_view name);

}  // namespace cavcoord
