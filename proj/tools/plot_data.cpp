#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "cavcoord/errors.hpp"
#include "cavcoord/scenario.hpp"
#include "commands.hpp"

namespace cavcoord::cli {

namespace {

struct Sample {
  double p = 0.0;
  double v = 0.0;
};

struct RunData {
  ScenarioConfig config;
  std::vector<double> times;                             // distinct sample times, ascending
  std::map<int, std::map<long, Sample>> samples;         // cav -> time index -> state
  std::map<int, PathId> path_of;
  std::map<int, double> entry_time;
  std::vector<double> replans;
};

std::ifstream open_input(const std::filesystem::path& file) {
  std::ifstream f(file);
  if (!f) throw IoError(fmt::format("missing run output {}", file.string()));
  return f;
}

RunData read_run(const std::filesystem::path& dir) {
  RunData run;
  {
    auto f = open_input(dir / "metrics.json");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(f);
      run.config = scenario_from_json(doc.at("scenario"), dir);
      for (const auto& v : doc.at("vehicles"))
        run.entry_time[v.at("cav").get<int>()] = v.at("entry_time").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw IoError(fmt::format("unreadable metrics.json: {}", e.what()));
    }
  }
  {
    auto f = open_input(dir / "trajectories.csv");
    std::string line;
    std::getline(f, line);
    std::map<std::string, long> index;  // keyed by the printed time so rows align exactly
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string t, cav, path, p, v;
      std::getline(ss, t, ',');
      std::getline(ss, cav, ',');
      std::getline(ss, path, ',');
      std::getline(ss, p, ',');
      std::getline(ss, v, ',');
      auto [it, fresh] = index.try_emplace(t, static_cast<long>(run.times.size()));
      if (fresh) run.times.push_back(std::stod(t));
      const int id = std::stoi(cav);
      run.path_of[id] = std::stoi(path);
      run.samples[id][it->second] = {std::stod(p), std::stod(v)};
    }
  }
  {
    auto f = open_input(dir / "events.jsonl");
    std::string line;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      const auto e = nlohmann::json::parse(line);
      if (e.at("type") == "replan") run.replans.push_back(e.at("t").get<double>());
    }
  }
  return run;
}

// Time at which the sampled motion of `cav` first reaches `location`.
std::optional<double> crossing_time(const RunData& run, int cav, double location) {
  const auto& s = run.samples.at(cav);
  const std::pair<const long, Sample>* prev = nullptr;
  for (const auto& kv : s) {
    if (kv.second.p >= location) {
      if (!prev) return run.times[kv.first];
      const double t0 = run.times[prev->first];
      const double t1 = run.times[kv.first];
      const double f = (location - prev->second.p) / (kv.second.p - prev->second.p);
      return t0 + f * (t1 - t0);
    }
    prev = &kv;
  }
  return std::nullopt;
}

}  // namespace

int cmd_plot_data(const PlotArgs& args) {
  try {
    const RunData run = read_run(args.run_dir);
    const auto& geometry = run.config.geometry;
    if (!geometry.has_path(args.path_id)) {
      fmt::print(stderr, "config error: path {} is not in the run geometry\n", args.path_id);
      return kConfig;
    }
    const SafetyParams& safety = run.config.safety;

    std::vector<int> cavs;
    for (const auto& [id, pid] : run.path_of)
      if (pid == args.path_id) cavs.push_back(id);
    std::sort(cavs.begin(), cavs.end(), [&](int a, int b) {
      return std::pair(run.entry_time.at(a), a) < std::pair(run.entry_time.at(b), b);
    });

    const auto file = args.run_dir / fmt::format("plot_path{}.csv", args.path_id);
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError(fmt::format("cannot write {}", file.string()));
    out << "t,replan_t";
    for (int id : cavs) out << fmt::format(",cav{}_p,cav{}_bound", id, id);
    out << '\n';

    if (!cavs.empty()) {
      const double step = run.config.output_step;
      std::size_t next_replan = 0;
      for (std::size_t k = 0; k < run.times.size(); ++k) {
        const double t = run.times[k];
        const auto key = static_cast<long>(k);
        bool any = false;
        for (int id : cavs) any = any || run.samples.at(id).count(key);
        while (next_replan < run.replans.size() && run.replans[next_replan] < t - 0.5 * step)
          ++next_replan;
        if (!any) continue;
        std::string replan;
        if (next_replan < run.replans.size() && run.replans[next_replan] < t + 0.5 * step)
          replan = fmt::format("{:.6f}", run.replans[next_replan]);
        out << fmt::format("{:.4f},{}", t, replan);
        for (std::size_t i = 0; i < cavs.size(); ++i) {
          const auto& own = run.samples.at(cavs[i]);
          auto it = own.find(key);
          if (it == own.end()) {
            out << ",,";
            continue;
          }
          out << fmt::format(",{:.6f},", it->second.p);
          if (i == 0) continue;
          const auto& lead = run.samples.at(cavs[i - 1]);
          if (auto lt = lead.find(key); lt != lead.end())
            out << fmt::format("{:.6f}", lt->second.p - safety.headway(it->second.v));
        }
        out << '\n';
      }
    }

    const auto markers_file = args.run_dir / fmt::format("plot_path{}_crossings.csv", args.path_id);
    std::ofstream markers(markers_file, std::ios::binary);
    if (!markers) throw IoError(fmt::format("cannot write {}", markers_file.string()));
    markers << "conflict_id,cav_id,path_id,t_cross,p_on_path\n";
    for (const auto& c : geometry.conflicts()) {
      const auto own = c.locations.find(args.path_id);
      if (own == c.locations.end()) continue;
      for (const auto& [id, pid] : run.path_of) {
        const auto other = c.locations.find(pid);
        if (pid == args.path_id || other == c.locations.end()) continue;
        if (auto t = crossing_time(run, id, other->second))
          markers << fmt::format("{},{},{},{:.6f},{:.6f}\n", c.id, id, pid, *t, own->second);
      }
    }
    fmt::print("wrote {} ({} vehicles) and {}\n", file.string(), cavs.size(),
               markers_file.string());
    return kOk;
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfig;
  } catch (const IoError& e) {
    fmt::print(stderr, "io error: {}\n", e.what());
    return kIo;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "io error: malformed run output ({})\n", e.what());
    return kIo;
  }
}

}  // namespace cavcoord::cli
