#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cavcoord/metrics.hpp"
#include "cavcoord/simulator.hpp"

namespace cavcoord::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kConfig = 2, kInfeasible = 3, kIo = 4 };

struct CommonArgs {
  std::filesystem::path config;
  std::filesystem::path out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> policy;
};

struct SweepArgs {
  CommonArgs common;
  std::vector<double> volumes;        // empty: keep the config's volumes
  std::vector<std::uint64_t> seeds;   // empty: the config seed only
};

struct PlotArgs {
  std::filesystem::path run_dir;
  int path_id = 0;
};

struct PolicyRow {
  SequencingPolicy policy;
  RunMetrics metrics;
  PairedChange change;
};

/// Paired fcfs and priority simulations of one config, plus the three rows
/// reported by `compare` (best_of_both is selected from the pair).
struct Comparison {
  std::uint64_t seed = 0;
  SimulationLog fcfs;
  SimulationLog priority;
  std::vector<PolicyRow> rows;
};

Comparison compare_policies(ScenarioConfig cfg);

int cmd_run(const CommonArgs& args);
int cmd_compare(const CommonArgs& args);
int cmd_sweep(const SweepArgs& args);
int cmd_validate_geometry(const std::filesystem::path& file);
int cmd_plot_data(const PlotArgs& args);

/// Parses argv and dispatches; returns the process exit code.
int main_entry(int argc, char** argv);

/// "0..29" (inclusive) or "1,5,7".
std::vector<std::uint64_t> parse_seeds(const std::string& text);
std::vector<double> parse_volumes(const std::string& text);

}  // namespace cavcoord::cli
