#include "cavcoord/geometry.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "cavcoord/errors.hpp"

namespace cavcoord {

namespace {

PathKind parse_kind(const std::string& s) {
  if (s == "straight") return PathKind::straight;
  if (s == "turn") return PathKind::turn;
  throw ConfigError(fmt::format("unknown path kind '{}'", s));
}

}  // namespace

std::string_view to_string(PathKind kind) {
  return kind == PathKind::straight ? "straight" : "turn";
}

IntersectionGeometry::IntersectionGeometry(std::vector<PathGeometry> paths,
                                           std::vector<ConflictPoint> conflicts)
    : paths_(std::move(paths)), conflicts_(std::move(conflicts)) {
  if (paths_.empty()) throw ConfigError("geometry has no paths");

  std::sort(paths_.begin(), paths_.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  std::sort(conflicts_.begin(), conflicts_.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });

  for (std::size_t i = 0; i < paths_.size(); ++i) {
    const auto& p = paths_[i];
    if (!(p.length > 0.0))
      throw ConfigError(fmt::format("path {}: length must be > 0 (got {})", p.id, p.length));
    if (i > 0 && paths_[i - 1].id == p.id)
      throw ConfigError(fmt::format("path {}: duplicate path id", p.id));
  }

  for (std::size_t i = 0; i < conflicts_.size(); ++i) {
    const auto& c = conflicts_[i];
    if (i > 0 && conflicts_[i - 1].id == c.id)
      throw ConfigError(fmt::format("conflict {}: duplicate conflict id", c.id));
    if (c.locations.size() < 2)
      throw ConfigError(fmt::format("conflict {}: needs at least two paths", c.id));
    for (const auto& [pid, d] : c.locations) {
      if (!has_path(pid))
        throw ConfigError(fmt::format("conflict {}: unknown path {}", c.id, pid));
      const double len = path(pid).length;
      if (!(d > 0.0 && d < len))
        throw ConfigError(fmt::format(
            "conflict {}: distance {} on path {} outside (0, {})", c.id, d, pid, len));
    }
  }

  // Two conflicts may not sit on the same path pair at the same distances.
  std::set<std::tuple<PathId, double, PathId, double>> seen;
  for (const auto& c : conflicts_) {
    for (auto a = c.locations.begin(); a != c.locations.end(); ++a) {
      for (auto b = std::next(a); b != c.locations.end(); ++b) {
        auto key = std::make_tuple(a->first, a->second, b->first, b->second);
        if (!seen.insert(key).second)
          throw ConfigError(fmt::format(
              "conflict {}: duplicates another conflict on paths {} and {}", c.id,
              a->first, b->first));
        crossing_table_[{a->first, b->first}].push_back({c.id, a->second, b->second});
        crossing_table_[{b->first, a->first}].push_back({c.id, b->second, a->second});
      }
    }
  }
}

bool IntersectionGeometry::has_path(PathId id) const {
  auto it = std::lower_bound(paths_.begin(), paths_.end(), id,
                             [](const PathGeometry& p, PathId v) { return p.id < v; });
  return it != paths_.end() && it->id == id;
}

const PathGeometry& IntersectionGeometry::path(PathId id) const {
  auto it = std::lower_bound(paths_.begin(), paths_.end(), id,
                             [](const PathGeometry& p, PathId v) { return p.id < v; });
  if (it == paths_.end() || it->id != id)
    throw std::out_of_range(fmt::format("unknown path id {}", id));
  return *it;
}

std::vector<ConflictCrossing> IntersectionGeometry::conflicts_between(PathId a,
                                                                      PathId b) const {
  path(a);
  path(b);
  return crossings(a, b);
}

const std::vector<ConflictCrossing>& IntersectionGeometry::crossings(PathId a, PathId b) const {
  static const std::vector<ConflictCrossing> none;
  auto it = crossing_table_.find({a, b});
  return it == crossing_table_.end() ? none : it->second;
}

nlohmann::json IntersectionGeometry::to_json() const {
  nlohmann::json doc;
  doc["paths"] = nlohmann::json::array();
  for (const auto& p : paths_) {
    nlohmann::json jp = {{"id", p.id}, {"length_m", p.length}, {"kind", to_string(p.kind)}};
    if (!p.name.empty()) jp["name"] = p.name;
    doc["paths"].push_back(std::move(jp));
  }
  doc["conflicts"] = nlohmann::json::array();
  for (const auto& c : conflicts_) {
    nlohmann::json locs = nlohmann::json::array();
    for (const auto& [pid, d] : c.locations)
      locs.push_back({{"path_id", pid}, {"distance_m", d}});
    doc["conflicts"].push_back({{"id", c.id}, {"locations", std::move(locs)}});
  }
  return doc;
}

IntersectionGeometry geometry_from_json(const nlohmann::json& doc) {
  try {
    const auto& g = doc.contains("geometry") ? doc.at("geometry") : doc;
    if (!g.is_object()) throw ConfigError("geometry must be an object");

    std::vector<PathGeometry> paths;
    for (const auto& jp : g.at("paths")) {
      PathGeometry p;
      p.id = jp.at("id").get<PathId>();
      p.kind = parse_kind(jp.value("kind", std::string{"straight"}));
      p.length = jp.at("length_m").get<double>();
      p.name = jp.value("name", std::string{});
      paths.push_back(std::move(p));
    }

    std::vector<ConflictPoint> conflicts;
    if (g.contains("conflicts")) {
      for (const auto& jc : g.at("conflicts")) {
        ConflictPoint c;
        c.id = jc.at("id").get<ConflictId>();
        for (const auto& loc : jc.at("locations")) {
          auto pid = loc.at("path_id").get<PathId>();
          if (!c.locations.emplace(pid, loc.at("distance_m").get<double>()).second)
            throw ConfigError(
                fmt::format("conflict {}: path {} listed twice", c.id, pid));
        }
        conflicts.push_back(std::move(c));
      }
    }
    return IntersectionGeometry(std::move(paths), std::move(conflicts));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("geometry: {}", e.what()));
  }
}

IntersectionGeometry load_geometry(std::string_view config_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(config_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(fmt::format("geometry document does not parse: {}", e.what()));
  }
  return geometry_from_json(doc);
}

IntersectionGeometry load_geometry_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(fmt::format("cannot open geometry file {}", file.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return load_geometry(ss.str());
}

}  // namespace cavcoord
