#include "cavcoord/metrics.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace cavcoord {

RunMetrics metrics(const SimulationLog& log) {
  RunMetrics m;
  m.policy = log.config.policy;
  m.simulated_policy = log.simulated_policy;
  m.seed = log.config.seed;

  double sum = 0.0;
  double weighted = 0.0;
  double weights = 0.0;
  double effort = 0.0;
  for (const auto& v : log.vehicles) {
    if (!v.exit_time) continue;
    VehicleMetrics vm{v.cav_id, v.path_id, v.entry_time, *v.exit_time, v.travel_time(), v.weight};
    for (std::size_t i = 0; i < v.segments.size(); ++i) {
      const auto& s = v.segments[i];
      const double until = i + 1 < v.segments.size() ? v.segments[i + 1].t_start() : *v.exit_time;
      vm.control_effort += s.control_effort_until(until);
    }
    sum += vm.travel_time;
    weighted += vm.weight * vm.travel_time;
    weights += vm.weight;
    effort += vm.control_effort;
    m.vehicles.push_back(vm);
  }
  if (m.vehicles.empty()) throw std::runtime_error("metrics: no vehicle exited the control zone");

  const auto n = static_cast<double>(m.vehicles.size());
  m.average_travel_time = sum / n;
  m.weighted_average_travel_time = weighted / weights;
  m.average_control_effort = effort / n;

  for (const auto& r : log.rounds) m.instances.push_back({r.tau, r.j_chosen, r.j_fcfs});
  for (const auto& e : log.events)
    if (e.at("type") == "deferral") ++m.deferrals;
  return m;
}

double percent_change(double value, double baseline) {
  return 100.0 * (value - baseline) / baseline;
}

PairedChange compare_to_baseline(const RunMetrics& run, const RunMetrics& baseline) {
  if (run.seed != baseline.seed)
    throw std::invalid_argument(
        fmt::format("paired comparison needs equal seeds ({} vs {})", run.seed, baseline.seed));
  if (run.vehicles.size() != baseline.vehicles.size())
    throw std::invalid_argument("paired comparison needs the same traffic");
  return {percent_change(run.average_travel_time, baseline.average_travel_time),
          percent_change(run.weighted_average_travel_time,
                         baseline.weighted_average_travel_time)};
}

nlohmann::json to_json(const RunMetrics& m) {
  nlohmann::json per_cav = nlohmann::json::array();
  for (const auto& v : m.vehicles)
    per_cav.push_back({{"cav", v.cav_id},
                       {"path", v.path_id},
                       {"entry_time", v.entry_time},
                       {"exit_time", v.exit_time},
                       {"travel_time", v.travel_time},
                       {"weight", v.weight},
                       {"control_effort", v.control_effort}});
  nlohmann::json inst = nlohmann::json::array();
  for (const auto& i : m.instances) inst.push_back({{"t", i.tau}, {"j", i.j}, {"j_fcfs", i.j_fcfs}});
  return {{"policy", to_string(m.policy)},
          {"simulated_policy", to_string(m.simulated_policy)},
          {"seed", m.seed},
          {"vehicles_exited", m.vehicles.size()},
          {"average_travel_time", m.average_travel_time},
          {"weighted_average_travel_time", m.weighted_average_travel_time},
          {"average_control_effort", m.average_control_effort},
          {"deferrals", m.deferrals},
          {"instances", inst},
          {"vehicles", per_cav}};
}

}  // namespace cavcoord
