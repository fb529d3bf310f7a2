#include "cavcoord/run_io.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "cavcoord/metrics.hpp"

namespace cavcoord {

void write_trajectories_csv(const SimulationLog& log, std::ostream& out) {
  out << "t,cav_id,path_id,p,v,u\n";
  const double step = log.config.output_step;
  double end = 0.0;
  for (const auto& v : log.vehicles)
    if (v.exit_time) end = std::max(end, *v.exit_time);

  const auto last = static_cast<long>(std::floor(end / step));
  for (long k = 0; k <= last; ++k) {
    const double t = static_cast<double>(k) * step;
    for (const auto& v : log.vehicles) {
      if (!v.exit_time || v.segments.empty()) continue;
      if (t < v.entry_time || t > *v.exit_time) continue;
      const auto s = v.state_at(t);
      out << fmt::format("{:.4f},{},{},{:.6f},{:.6f},{:.6f}\n", t, v.cav_id, v.path_id, s.p, s.v,
                         s.u);
    }
  }
}

void write_events_jsonl(const SimulationLog& log, std::ostream& out) {
  for (const auto& e : log.events) out << e.dump() << '\n';
}

nlohmann::json metrics_document(const SimulationLog& log) {
  auto doc = to_json(metrics(log));
  doc["scenario"] = to_json(log.config);
  return doc;
}

void write_run_outputs(const SimulationLog& log, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));

  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw IoError(fmt::format("cannot write {}", (dir / name).string()));
    return f;
  };
  {
    auto f = open("trajectories.csv");
    write_trajectories_csv(log, f);
  }
  {
    auto f = open("metrics.json");
    f << metrics_document(log).dump(2) << '\n';
  }
  {
    auto f = open("events.jsonl");
    write_events_jsonl(log, f);
  }
}

}  // namespace cavcoord
