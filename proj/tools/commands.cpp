#include "commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "cavcoord/errors.hpp"
#include "cavcoord/metrics.hpp"
#include "cavcoord/run_io.hpp"
#include "cavcoord/scenario.hpp"
#include "cavcoord/simulator.hpp"

namespace cavcoord::cli {

namespace {

ScenarioConfig load_config(const CommonArgs& args) {
  ScenarioConfig cfg = load_scenario_file(args.config);
  if (args.seed) cfg.seed = *args.seed;
  if (args.policy) cfg.policy = parse_policy(*args.policy);
  cfg.validate();
  return cfg;
}

void write_json(const std::filesystem::path& file, const nlohmann::json& doc) {
  std::error_code ec;
  std::filesystem::create_directories(file.parent_path(), ec);
  std::ofstream f(file, std::ios::binary);
  if (!f) throw IoError(fmt::format("cannot write {}", file.string()));
  f << doc.dump(2) << '\n';
}

// Maps library exceptions onto exit codes; infeasibility dumps its state.
template <typename Fn>
int guarded(const std::filesystem::path& out, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfig;
  } catch (const PlannerInfeasibleError& e) {
    fmt::print(stderr, "planner infeasible: {}\n", e.what());
    try {
      write_json(out / "infeasible_state.json", e.state());
      fmt::print(stderr, "state dump written to {}\n", (out / "infeasible_state.json").string());
    } catch (const std::exception&) {
    }
    return kInfeasible;
  } catch (const InfeasibleError& e) {
    fmt::print(stderr, "planner infeasible: {}\n", e.what());
    return kInfeasible;
  } catch (const IoError& e) {
    fmt::print(stderr, "io error: {}\n", e.what());
    return kIo;
  } catch (const std::runtime_error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kUsage;
  }
}

}  // namespace

Comparison compare_policies(ScenarioConfig cfg) {
  Comparison c;
  c.seed = cfg.seed;
  cfg.policy = SequencingPolicy::fcfs;
  c.fcfs = run_policy(cfg, SequencingPolicy::fcfs);
  cfg.policy = SequencingPolicy::priority;
  c.priority = run_policy(cfg, SequencingPolicy::priority);

  const RunMetrics base = metrics(c.fcfs);
  const RunMetrics prio = metrics(c.priority);
  const SimulationLog best = select_best_of_both(c.fcfs, c.priority);
  const RunMetrics both = metrics(best);
  c.rows = {{SequencingPolicy::fcfs, base, compare_to_baseline(base, base)},
            {SequencingPolicy::priority, prio, compare_to_baseline(prio, base)},
            {SequencingPolicy::best_of_both, both, compare_to_baseline(both, base)}};
  return c;
}

namespace {

nlohmann::json comparison_json(const Comparison& c) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : c.rows)
    rows.push_back({{"policy", to_string(r.policy)},
                    {"simulated_policy", to_string(r.metrics.simulated_policy)},
                    {"seed", r.metrics.seed},
                    {"vehicles_exited", r.metrics.vehicles.size()},
                    {"average_travel_time", r.metrics.average_travel_time},
                    {"weighted_average_travel_time", r.metrics.weighted_average_travel_time},
                    {"average_change_pct", r.change.average_pct},
                    {"weighted_average_change_pct", r.change.weighted_average_pct}});
  return {{"seed", c.seed},
          {"simulations",
           {{{"policy", "fcfs"}, {"seed", c.fcfs.config.seed}},
            {{"policy", "priority"}, {"seed", c.priority.config.seed}}}},
          {"rows", rows}};
}

struct Summary {
  double mean = 0.0, min = 0.0, max = 0.0;
};

Summary summarize(const std::vector<double>& xs) {
  Summary s{0.0, xs.front(), xs.front()};
  for (double x : xs) {
    s.mean += x;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  s.mean /= static_cast<double>(xs.size());
  return s;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  if (auto dots = text.find(".."); dots != std::string::npos) {
    const auto lo = std::stoull(text.substr(0, dots));
    const auto hi = std::stoull(text.substr(dots + 2));
    if (hi < lo) throw ConfigError(fmt::format("empty seed range {}", text));
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
    return out;
  }
  for (const auto& item : split(text, ',')) out.push_back(std::stoull(item));
  if (out.empty()) throw ConfigError("no seeds given");
  return out;
}

std::vector<double> parse_volumes(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(std::stod(item));
  if (out.empty()) throw ConfigError("no volumes given");
  return out;
}

int cmd_run(const CommonArgs& args) {
  return guarded(args.out, [&] {
    const ScenarioConfig cfg = load_config(args);
    spdlog::info("running seed {} under {}", cfg.seed, to_string(cfg.policy));
    const SimulationLog log = run(cfg);
    write_run_outputs(log, args.out);
    const RunMetrics m = metrics(log);
    fmt::print("{} vehicles, average travel time {:.3f} s (weighted {:.3f} s)\n",
               m.vehicles.size(), m.average_travel_time, m.weighted_average_travel_time);
    return static_cast<int>(kOk);
  });
}

int cmd_compare(const CommonArgs& args) {
  return guarded(args.out, [&] {
    const ScenarioConfig cfg = load_config(args);
    const Comparison c = compare_policies(cfg);
    write_run_outputs(c.fcfs, args.out / "fcfs");
    write_run_outputs(c.priority, args.out / "priority");
    write_json(args.out / "comparison.json", comparison_json(c));
    for (const auto& r : c.rows)
      fmt::print("{:<13} avg {:8.3f} s ({:+.3f}%)  weighted {:8.3f} s ({:+.3f}%)\n",
                 to_string(r.policy), r.metrics.average_travel_time, r.change.average_pct,
                 r.metrics.weighted_average_travel_time, r.change.weighted_average_pct);
    return static_cast<int>(kOk);
  });
}

int cmd_sweep(const SweepArgs& args) {
  return guarded(args.common.out, [&] {
    const ScenarioConfig base = load_config(args.common);
    std::vector<double> volumes = args.volumes;
    std::vector<std::uint64_t> seeds = args.seeds;
    if (seeds.empty()) seeds.push_back(base.seed);

    struct Cell {
      std::optional<double> volume;
      std::uint64_t seed;
    };
    std::vector<Cell> cells;
    if (volumes.empty()) {
      for (auto s : seeds) cells.push_back({std::nullopt, s});
    } else {
      for (double v : volumes)
        for (auto s : seeds) cells.push_back({v, s});
    }

    auto run_cell = [&](const Cell& cell) {
      ScenarioConfig cfg = base;
      cfg.seed = cell.seed;
      if (cell.volume)
        for (auto& [pid, v] : cfg.volume) v = *cell.volume;
      cfg.validate();
      return comparison_json(compare_policies(cfg));
    };

    // Cells are independent; results are collected in cell order.
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<nlohmann::json> results(cells.size());
    for (std::size_t begin = 0; begin < cells.size(); begin += workers) {
      std::vector<std::future<nlohmann::json>> batch;
      const std::size_t end = std::min(cells.size(), begin + workers);
      for (std::size_t i = begin; i < end; ++i)
        batch.push_back(std::async(std::launch::async, run_cell, cells[i]));
      for (std::size_t i = begin; i < end; ++i) results[i] = batch[i - begin].get();
    }

    nlohmann::json out_cells = nlohmann::json::array();
    std::map<std::string, std::map<std::string, std::vector<double>>> changes;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string vkey = cells[i].volume ? fmt::format("{}", *cells[i].volume) : "config";
      auto cell = results[i];
      cell["volume_veh_h"] = cells[i].volume ? nlohmann::json(*cells[i].volume) : nlohmann::json("config");
      for (const auto& row : cell["rows"]) {
        const std::string pol = row["policy"];
        if (pol == "fcfs") continue;
        changes[vkey][pol + ".average_change_pct"].push_back(row["average_change_pct"]);
        changes[vkey][pol + ".weighted_average_change_pct"].push_back(
            row["weighted_average_change_pct"]);
      }
      out_cells.push_back(std::move(cell));
    }

    nlohmann::json summary = nlohmann::json::object();
    for (const auto& [vkey, series] : changes) {
      for (const auto& [name, xs] : series) {
        const Summary s = summarize(xs);
        summary[vkey][name] = {{"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"n", xs.size()}};
      }
    }
    write_json(args.common.out / "sweep.json", {{"cells", out_cells}, {"summary", summary}});

    for (const auto& [vkey, series] : changes) {
      const Summary p = summarize(series.at("priority.average_change_pct"));
      const Summary b = summarize(series.at("best_of_both.average_change_pct"));
      fmt::print("volume {:>8}: priority mean {:+.3f}% [{:+.3f}, {:+.3f}]  best_of_both mean {:+.3f}% [{:+.3f}, {:+.3f}]\n",
                 vkey, p.mean, p.min, p.max, b.mean, b.min, b.max);
    }
    return static_cast<int>(kOk);
  });
}

int cmd_validate_geometry(const std::filesystem::path& file) {
  return guarded(file.parent_path(), [&] {
    std::ifstream in(file);
    if (!in) throw ConfigError(fmt::format("cannot open {}", file.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(fmt::format("{} does not parse: {}", file.string(), e.what()));
    }
    IntersectionGeometry g;
    if (doc.contains("geometry") && doc["geometry"].is_string()) {
      std::filesystem::path ref = doc["geometry"].get<std::string>();
      g = load_geometry_file(ref.is_relative() ? file.parent_path() / ref : ref);
    } else {
      g = geometry_from_json(doc);
    }
    fmt::print("{}: {} paths, {} conflict points\n", file.string(), g.paths().size(),
               g.conflicts().size());
    for (const auto& p : g.paths())
      fmt::print("  path {} ({}, {} m)\n", p.id, to_string(p.kind), p.length);
    return static_cast<int>(kOk);
  });
}

int main_entry(int argc, char** argv) {
  if (const char* level = std::getenv("CAVCOORD_LOG"))
    spdlog::set_level(spdlog::level::from_str(level));
  else
    spdlog::set_level(spdlog::level::warn);

  CLI::App app{"Coordination of automated vehicles at a signal-free intersection"};
  app.require_subcommand(1);

  CommonArgs common;
  std::uint64_t seed = 0;
  std::string policy;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "Scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "Output directory");
    sub->add_option("--seed", seed, "Override the scenario seed");
    sub->add_option("--policy", policy, "fcfs | priority | best_of_both")
        ->check(CLI::IsMember({"fcfs", "priority", "best_of_both"}));
  };

  auto* run_cmd = app.add_subcommand("run", "Simulate one scenario");
  add_common(run_cmd);
  auto* compare_cmd = app.add_subcommand("compare", "Paired fcfs / priority / best_of_both runs");
  add_common(compare_cmd);

  auto* sweep_cmd = app.add_subcommand("sweep", "Paired comparisons over volumes x seeds");
  add_common(sweep_cmd);
  std::string volumes_text;
  std::string seeds_text;
  sweep_cmd->add_option("--volumes", volumes_text, "Per-path volumes, e.g. 800,1200,2400");
  sweep_cmd->add_option("--seeds", seeds_text, "Seed range a..b or list a,b,c");

  auto* validate_cmd = app.add_subcommand("validate-geometry", "Check a geometry or scenario file");
  std::filesystem::path geometry_file;
  validate_cmd->add_option("--config", geometry_file, "Geometry or scenario file")
      ->required()
      ->check(CLI::ExistingFile);

  auto* plot_cmd = app.add_subcommand("plot-data", "Time-position data for one path of a run");
  PlotArgs plot_args;
  plot_cmd->add_option("--out", plot_args.run_dir, "Directory of a finished run")->required();
  plot_cmd->add_option("--path-id", plot_args.path_id, "Path to extract")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (!policy.empty()) common.policy = policy;
  for (auto* sub : {run_cmd, compare_cmd, sweep_cmd})
    if (sub->parsed() && sub->count("--seed")) common.seed = seed;

  try {
    if (run_cmd->parsed()) return cmd_run(common);
    if (compare_cmd->parsed()) return cmd_compare(common);
    if (sweep_cmd->parsed()) {
      SweepArgs sweep{common, {}, {}};
      if (!volumes_text.empty()) sweep.volumes = parse_volumes(volumes_text);
      if (!seeds_text.empty()) sweep.seeds = parse_seeds(seeds_text);
      return cmd_sweep(sweep);
    }
    if (validate_cmd->parsed()) return cmd_validate_geometry(geometry_file);
    if (plot_cmd->parsed()) return cmd_plot_data(plot_args);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfig;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "bad argument: {}\n", e.what());
    return kConfig;
  }
  return kUsage;
}

}  // namespace cavcoord::cli
