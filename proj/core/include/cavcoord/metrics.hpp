#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cavcoord/simulator.hpp"

namespace cavcoord {

struct VehicleMetrics {
  CavId cav_id = 0;
  PathId path_id = 0;
  double entry_time = 0.0;
  double exit_time = 0.0;
  double travel_time = 0.0;
  double weight = 1.0;
  double control_effort = 0.0;  // integral of u^2 / 2 along the realized motion
};

/// Total weighted completion time of one replanning instance, for the chosen
/// sequence and for the FCFS sequence of the same jobs.
struct InstanceCost {
  double tau = 0.0;
  double j = 0.0;
  double j_fcfs = 0.0;
};

struct RunMetrics {
  SequencingPolicy policy = SequencingPolicy::fcfs;            // as configured
  SequencingPolicy simulated_policy = SequencingPolicy::fcfs;  // what produced the log
  std::uint64_t seed = 0;
  std::vector<VehicleMetrics> vehicles;  // exited vehicles only
  double average_travel_time = 0.0;
  double weighted_average_travel_time = 0.0;
  double average_control_effort = 0.0;
  std::vector<InstanceCost> instances;
  std::size_t deferrals = 0;
};

/// Throws std::runtime_error when no vehicle has exited.
RunMetrics metrics(const SimulationLog& log);

/// 100 * (value - baseline) / baseline.
double percent_change(double value, double baseline);

struct PairedChange {
  double average_pct = 0.0;
  double weighted_average_pct = 0.0;
};

/// Percent change of `run` against `baseline`. The two must come from the
/// same seed and the same traffic (std::invalid_argument otherwise).
PairedChange compare_to_baseline(const RunMetrics& run, const RunMetrics& baseline);

nlohmann::json to_json(const RunMetrics& m);

}  // namespace cavcoord
