#pragma once

#include <filesystem>
#include <ostream>

#include "cavcoord/simulator.hpp"

namespace cavcoord {

/// `t,cav_id,path_id,p,v,u` for every in-zone vehicle at multiples of the
/// configured output step, rows ordered by time then vehicle id.
void write_trajectories_csv(const SimulationLog& log, std::ostream& out);

/// One JSON object per line, in the order the simulation produced them.
void write_events_jsonl(const SimulationLog& log, std::ostream& out);

/// Run metrics plus the resolved scenario under "scenario".
nlohmann::json metrics_document(const SimulationLog& log);

/// Writes trajectories.csv, metrics.json and events.jsonl into `dir`,
/// creating it when needed. Throws IoError on failure.
void write_run_outputs(const SimulationLog& log, const std::filesystem::path& dir);

}  // namespace cavcoord
