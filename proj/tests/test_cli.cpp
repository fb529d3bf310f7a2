#include <gtest/gtest.h>

#include <fstream>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cavcoord/errors.hpp"
#include "commands.hpp"

namespace fs = std::filesystem;
using namespace cavcoord::cli;

namespace {

const fs::path kData{CAVCOORD_DATA_DIR};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / "cavcoord_cli_tests" / info->name();
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  fs::path write_scenario(const std::string& name, const nlohmann::json& patch) {
    std::ifstream in(kData / "default_scenario.json");
    auto doc = nlohmann::json::parse(in);
    doc["geometry"] = (kData / "default_geometry.json").string();
    doc.merge_patch(patch);
    const auto file = dir_ / name;
    std::ofstream(file) << doc.dump(2);
    return file;
  }

  fs::path short_scenario() {
    return write_scenario("short.json", {{"horizon", {{"time_s", 20.0}, {"max_cavs", nullptr}}},
                                         {"volume_veh_h", 800}});
  }

  static std::string slurp(const fs::path& f) {
    std::ifstream in(f, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  int invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "cavcoord");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return main_entry(static_cast<int>(argv.size()), argv.data());
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, RunWritesThreeFiles) {
  const auto out = dir_ / "run";
  EXPECT_EQ(cmd_run({short_scenario(), out, 0, std::nullopt}), kOk);
  for (const char* f : {"trajectories.csv", "metrics.json", "events.jsonl"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  const auto m = nlohmann::json::parse(slurp(out / "metrics.json"));
  EXPECT_GT(m["vehicles_exited"].get<int>(), 0);
}

TEST_F(Cli, RunIsByteIdentical) {
  const auto cfg = short_scenario();
  ASSERT_EQ(cmd_run({cfg, dir_ / "a", 3, std::nullopt}), kOk);
  ASSERT_EQ(cmd_run({cfg, dir_ / "b", 3, std::nullopt}), kOk);
  for (const char* f : {"trajectories.csv", "metrics.json", "events.jsonl"})
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
}

TEST_F(Cli, ConfigErrors) {
  const auto bad_speed = write_scenario("speed.json", {{"entry_speed", {{"min", 12}, {"max", 30}}}});
  EXPECT_EQ(cmd_run({bad_speed, dir_ / "x", std::nullopt, std::nullopt}), kConfig);
  const auto malformed = dir_ / "malformed.json";
  std::ofstream(malformed) << "{ \"geometry\": ";
  EXPECT_EQ(cmd_run({malformed, dir_ / "y", std::nullopt, std::nullopt}), kConfig);
  EXPECT_EQ(cmd_run({short_scenario(), dir_ / "z", std::nullopt, "lottery"}), kConfig);
}

TEST_F(Cli, InfeasibleRunWritesStateDump) {
  // heavy traffic with observation noise: replanning eventually finds no
  // safe exit time for some vehicle
  const auto cfg = write_scenario(
      "noisy.json", {{"noise", {{"position_m", 2.0}, {"speed_mps", 0.2}}},
                     {"policy", "fcfs"},
                     {"horizon", {{"time_s", 300.0}, {"max_cavs", 24}}}});
  const auto out = dir_ / "inf";
  EXPECT_EQ(cmd_run({cfg, out, 0, std::nullopt}), kInfeasible);
  EXPECT_TRUE(fs::exists(out / "infeasible_state.json"));
}

TEST_F(Cli, UnwritableOutputIsIoError) {
  const auto blocker = dir_ / "file";
  std::ofstream(blocker) << "x";
  EXPECT_EQ(cmd_run({short_scenario(), blocker / "sub", 0, std::nullopt}), kIo);
}

TEST_F(Cli, CompareWritesThreeRows) {
  const auto out = dir_ / "cmp";
  ASSERT_EQ(cmd_compare({short_scenario(), out, 1, std::nullopt}), kOk);
  const auto doc = nlohmann::json::parse(slurp(out / "comparison.json"));
  ASSERT_EQ(doc["rows"].size(), 3u);
  EXPECT_EQ(doc["rows"][0]["policy"], "fcfs");
  EXPECT_EQ(doc["rows"][1]["policy"], "priority");
  EXPECT_EQ(doc["rows"][2]["policy"], "best_of_both");
  EXPECT_EQ(doc["rows"][0]["average_change_pct"], 0.0);
  EXPECT_LE(doc["rows"][2]["average_change_pct"].get<double>(), 0.0);
  ASSERT_EQ(doc["simulations"].size(), 2u);
  for (const auto& s : doc["simulations"]) EXPECT_EQ(s["seed"], 1);
  EXPECT_TRUE(fs::exists(out / "fcfs" / "events.jsonl"));
  EXPECT_TRUE(fs::exists(out / "priority" / "events.jsonl"));
}

TEST_F(Cli, SweepSummarizesCells) {
  const auto out = dir_ / "sweep";
  SweepArgs args{{short_scenario(), out, std::nullopt, std::nullopt}, {800, 1200}, {0, 1}};
  ASSERT_EQ(cmd_sweep(args), kOk);
  const auto doc = nlohmann::json::parse(slurp(out / "sweep.json"));
  EXPECT_EQ(doc["cells"].size(), 4u);
  EXPECT_TRUE(doc["summary"].contains("800"));
  EXPECT_TRUE(doc["summary"].contains("1200"));
}

TEST_F(Cli, ValidateGeometry) {
  EXPECT_EQ(cmd_validate_geometry(kData / "default_geometry.json"), kOk);
  EXPECT_EQ(cmd_validate_geometry(kData / "default_scenario.json"), kOk);
  const auto bad = dir_ / "bad.json";
  std::ofstream(bad) << R"({"paths":[{"id":1,"length_m":10}],
    "conflicts":[{"id":1,"locations":[{"path_id":1,"distance_m":50},{"path_id":1,"distance_m":3}]}]})";
  EXPECT_EQ(cmd_validate_geometry(bad), kConfig);
  EXPECT_EQ(cmd_validate_geometry(dir_ / "missing.json"), kConfig);
}

TEST_F(Cli, PlotData) {
  const auto run = dir_ / "run";
  ASSERT_EQ(cmd_run({short_scenario(), run, 0, std::nullopt}), kOk);
  ASSERT_EQ(cmd_plot_data({run, 2}), kOk);
  std::istringstream csv(slurp(run / "plot_path2.csv"));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header.rfind("t,replan_t", 0), 0u);
  const auto cavs = std::count(header.begin(), header.end(), ',') - 1;
  EXPECT_EQ(cavs % 2, 0);
  EXPECT_GT(cavs, 0);
  EXPECT_NE(header.find("_bound"), std::string::npos);
  EXPECT_TRUE(fs::exists(run / "plot_path2_crossings.csv"));

  EXPECT_EQ(cmd_plot_data({run, 77}), kConfig);
  EXPECT_EQ(cmd_plot_data({dir_ / "nowhere", 1}), kIo);
}

TEST_F(Cli, PlotDataEmptyPath) {
  const auto cfg = write_scenario("one_path.json", {{"volume_veh_h", {{"1", 800}}},
                                                    {"horizon", {{"time_s", 10.0}, {"max_cavs", nullptr}}}});
  const auto run = dir_ / "run";
  ASSERT_EQ(cmd_run({cfg, run, 0, std::nullopt}), kOk);
  ASSERT_EQ(cmd_plot_data({run, 4}), kOk);
  EXPECT_EQ(slurp(run / "plot_path4.csv"), "t,replan_t\n");
}

TEST_F(Cli, ArgumentParsing) {
  EXPECT_EQ(parse_seeds("0..3"), (std::vector<std::uint64_t>{0, 1, 2, 3}));
  EXPECT_EQ(parse_seeds("5,2"), (std::vector<std::uint64_t>{5, 2}));
  EXPECT_THROW(parse_seeds("3..1"), cavcoord::ConfigError);
  EXPECT_EQ(parse_volumes("800,1200"), (std::vector<double>{800, 1200}));

  const auto cfg = short_scenario().string();
  EXPECT_EQ(invoke({"run", "--config", cfg, "--out", (dir_ / "m").string(), "--seed", "2",
                    "--policy", "fcfs"}),
            kOk);
  EXPECT_NE(invoke({"run", "--config", cfg, "--policy", "sometimes"}), kOk);
  EXPECT_NE(invoke({"launch"}), kOk);
  EXPECT_NE(invoke({"run"}), kOk);
}
