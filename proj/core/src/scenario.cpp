#include "cavcoord/scenario.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "cavcoord/errors.hpp"

namespace cavcoord {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view what, std::string_view name,
                const std::pair<std::string_view, Enum> (&table)[N]) {
  for (const auto& [key, value] : table)
    if (key == name) return value;
  throw ConfigError(fmt::format("unknown {} '{}'", what, name));
}

template <typename Enum, std::size_t N>
std::string_view enum_name(Enum v, const std::pair<std::string_view, Enum> (&table)[N]) {
  for (const auto& [key, value] : table)
    if (value == v) return key;
  return "?";
}

constexpr std::pair<std::string_view, ArrivalModel> kArrival[] = {
    {"poisson", ArrivalModel::poisson}, {"uniform_headway", ArrivalModel::uniform_headway}};
constexpr std::pair<std::string_view, ReplanMode> kReplan[] = {
    {"on_arrival", ReplanMode::on_arrival},
    {"periodic", ReplanMode::periodic},
    {"both", ReplanMode::both}};
constexpr std::pair<std::string_view, SequencingPolicy> kPolicy[] = {
    {"fcfs", SequencingPolicy::fcfs},
    {"priority", SequencingPolicy::priority},
    {"best_of_both", SequencingPolicy::best_of_both}};
constexpr std::pair<std::string_view, WeightMode> kWeight[] = {
    {"inverse_window", WeightMode::inverse_window}, {"uniform", WeightMode::uniform}};
constexpr std::pair<std::string_view, ProcessingTimeMode> kProcessing[] = {
    {"absolute", ProcessingTimeMode::absolute}, {"residual", ProcessingTimeMode::residual}};

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(fmt::format("cannot open {}", file.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string_view to_string(ArrivalModel m) { return enum_name(m, kArrival); }
std::string_view to_string(ReplanMode m) { return enum_name(m, kReplan); }
std::string_view to_string(SequencingPolicy p) { return enum_name(p, kPolicy); }
std::string_view to_string(WeightMode m) { return enum_name(m, kWeight); }
std::string_view to_string(ProcessingTimeMode m) { return enum_name(m, kProcessing); }

SequencingPolicy parse_policy(std::string_view name) {
  return parse_enum("sequencing policy", name, kPolicy);
}

void ScenarioConfig::validate() const {
  limits.validate();
  safety.validate();
  if (volume.empty()) throw ConfigError("no traffic volume given");
  for (const auto& [pid, v] : volume) {
    if (!geometry.has_path(pid))
      throw ConfigError(fmt::format("volume given for unknown path {}", pid));
    if (!(v > 0.0)) throw ConfigError(fmt::format("volume on path {} must be > 0", pid));
  }
  if (!(entry_speed_min <= entry_speed_max))
    throw ConfigError("entry speed range is inverted");
  if (entry_speed_min < limits.v_min || entry_speed_max > limits.v_max)
    throw ConfigError(fmt::format("entry speed range [{}, {}] outside speed limits [{}, {}]",
                                  entry_speed_min, entry_speed_max, limits.v_min, limits.v_max));
  if (noise.position < 0.0 || noise.speed < 0.0)
    throw ConfigError("noise half-ranges must be >= 0");
  if ((replanning == ReplanMode::periodic || replanning == ReplanMode::both) &&
      !(replan_period > 0.0))
    throw ConfigError("replanning period must be > 0");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be > 0");
  if (max_cavs && *max_cavs < 0) throw ConfigError("max_cavs must be >= 0");
  if (!(planner_grid_step > 0.0)) throw ConfigError("planner grid step must be > 0");
  if (!(output_step > 0.0)) throw ConfigError("output step must be > 0");
  if (!(min_replan_distance >= 0.0)) throw ConfigError("min_replan_distance must be >= 0");
}

ScenarioConfig scenario_from_json(const nlohmann::json& doc,
                                  const std::filesystem::path& base_dir) {
  ScenarioConfig cfg;
  try {
    if (!doc.is_object()) throw ConfigError("scenario must be a JSON object");

    const auto& g = doc.at("geometry");
    if (g.is_string()) {
      std::filesystem::path ref = g.get<std::string>();
      if (ref.is_relative()) ref = base_dir / ref;
      cfg.geometry = load_geometry_file(ref);
    } else {
      cfg.geometry = geometry_from_json(g);
    }

    if (doc.contains("limits")) {
      const auto& l = doc.at("limits");
      cfg.limits.u_min = l.value("u_min", cfg.limits.u_min);
      cfg.limits.u_max = l.value("u_max", cfg.limits.u_max);
      cfg.limits.v_min = l.value("v_min", cfg.limits.v_min);
      cfg.limits.v_max = l.value("v_max", cfg.limits.v_max);
    }
    if (doc.contains("safety")) {
      const auto& s = doc.at("safety");
      cfg.safety.gamma = s.value("gamma", cfg.safety.gamma);
      cfg.safety.phi = s.value("phi", cfg.safety.phi);
    }

    const auto& vol = doc.at("volume_veh_h");
    if (vol.is_number()) {
      for (const auto& p : cfg.geometry.paths()) cfg.volume[p.id] = vol.get<double>();
    } else {
      for (const auto& [key, v] : vol.items()) cfg.volume[std::stoi(key)] = v.get<double>();
    }

    cfg.arrival_model = parse_enum("arrival model", doc.value("arrival_model", "poisson"), kArrival);
    if (doc.contains("entry_speed")) {
      cfg.entry_speed_min = doc["entry_speed"].value("min", cfg.entry_speed_min);
      cfg.entry_speed_max = doc["entry_speed"].value("max", cfg.entry_speed_max);
    }
    if (doc.contains("noise")) {
      cfg.noise.position = doc["noise"].value("position_m", 0.0);
      cfg.noise.speed = doc["noise"].value("speed_mps", 0.0);
    }
    if (doc.contains("replanning")) {
      const auto& r = doc.at("replanning");
      cfg.replanning = parse_enum("replanning mode", r.value("mode", "on_arrival"), kReplan);
      cfg.replan_period = r.value("period_s", cfg.replan_period);
    }
    cfg.policy = parse_policy(doc.value("policy", "priority"));
    cfg.weight_mode = parse_enum("weight mode", doc.value("weight_mode", "inverse_window"), kWeight);
    cfg.processing_time =
        parse_enum("processing time mode", doc.value("processing_time", "absolute"), kProcessing);

    if (doc.contains("horizon")) {
      const auto& h = doc.at("horizon");
      cfg.horizon = h.value("time_s", cfg.horizon);
      if (h.contains("max_cavs") && !h["max_cavs"].is_null())
        cfg.max_cavs = h["max_cavs"].get<int>();
    }
    cfg.seed = doc.value("seed", std::uint64_t{0});
    cfg.planner_grid_step = doc.value("planner_grid_step_s", cfg.planner_grid_step);
    cfg.output_step = doc.value("output_step_s", cfg.output_step);
    cfg.min_replan_distance = doc.value("min_replan_distance_m", cfg.min_replan_distance);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("scenario: {}", e.what()));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("scenario: bad path id in volume map ({})", e.what()));
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(std::string_view text, const std::filesystem::path& base_dir) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(fmt::format("scenario does not parse: {}", e.what()));
  }
  return scenario_from_json(doc, base_dir);
}

ScenarioConfig load_scenario_file(const std::filesystem::path& file) {
  return load_scenario(read_file(file), file.parent_path());
}

nlohmann::json to_json(const ScenarioConfig& cfg) {
  nlohmann::json vol = nlohmann::json::object();
  for (const auto& [pid, v] : cfg.volume) vol[std::to_string(pid)] = v;
  nlohmann::json horizon = {{"time_s", cfg.horizon}};
  horizon["max_cavs"] = cfg.max_cavs ? nlohmann::json(*cfg.max_cavs) : nlohmann::json(nullptr);
  return {
      {"geometry", cfg.geometry.to_json()},
      {"limits",
       {{"u_min", cfg.limits.u_min},
        {"u_max", cfg.limits.u_max},
        {"v_min", cfg.limits.v_min},
        {"v_max", cfg.limits.v_max}}},
      {"safety", {{"gamma", cfg.safety.gamma}, {"phi", cfg.safety.phi}}},
      {"volume_veh_h", vol},
      {"arrival_model", to_string(cfg.arrival_model)},
      {"entry_speed", {{"min", cfg.entry_speed_min}, {"max", cfg.entry_speed_max}}},
      {"noise", {{"position_m", cfg.noise.position}, {"speed_mps", cfg.noise.speed}}},
      {"replanning", {{"mode", to_string(cfg.replanning)}, {"period_s", cfg.replan_period}}},
      {"policy", to_string(cfg.policy)},
      {"weight_mode", to_string(cfg.weight_mode)},
      {"processing_time", to_string(cfg.processing_time)},
      {"horizon", horizon},
      {"seed", cfg.seed},
      {"planner_grid_step_s", cfg.planner_grid_step},
      {"output_step_s", cfg.output_step},
      {"min_replan_distance_m", cfg.min_replan_distance},

  };
}

}  // namespace cavcoord
