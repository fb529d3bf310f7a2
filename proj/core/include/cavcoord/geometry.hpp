#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace cavcoord {

using PathId = int;
using ConflictId = int;

enum class PathKind { straight, turn };

struct PathGeometry {
  PathId id = 0;
  double length = 0.0;  // m, control-zone entry to exit
  PathKind kind = PathKind::straight;
  std::string name;
};

/// A point where two or more paths cross. Distances are measured from each
/// path's control-zone entry.
struct ConflictPoint {
  ConflictId id = 0;
  std::map<PathId, double> locations;
};

struct ConflictCrossing {
  ConflictId conflict_id = 0;
  double distance_on_a = 0.0;
  double distance_on_b = 0.0;

  friend bool operator==(const ConflictCrossing&, const ConflictCrossing&) = default;
};

class IntersectionGeometry {
 public:
  IntersectionGeometry() = default;

  /// Validates every invariant and sorts paths and conflicts by id.
  /// Throws ConfigError naming the offending path or conflict.
  IntersectionGeometry(std::vector<PathGeometry> paths,
                       std::vector<ConflictPoint> conflicts);

  const std::vector<PathGeometry>& paths() const { return paths_; }
  const std::vector<ConflictPoint>& conflicts() const { return conflicts_; }

  bool has_path(PathId id) const;
  /// Throws std::out_of_range for an unknown id.
  const PathGeometry& path(PathId id) const;

  /// Conflicts whose locations include both paths, sorted by conflict id.
  /// Empty for a == b: same-path interaction is rear-end, not lateral.
  std::vector<ConflictCrossing> conflicts_between(PathId a, PathId b) const;

  /// Same result as conflicts_between without the id checks or the copy.
  const std::vector<ConflictCrossing>& crossings(PathId a, PathId b) const;

  nlohmann::json to_json() const;

 private:
  std::vector<PathGeometry> paths_;
  std::vector<ConflictPoint> conflicts_;
  std::map<std::pair<PathId, PathId>, std::vector<ConflictCrossing>> crossing_table_;
};

IntersectionGeometry geometry_from_json(const nlohmann::json& doc);
IntersectionGeometry load_geometry(std::string_view config_text);
IntersectionGeometry load_geometry_file(const std::filesystem::path& file);

std::string_view to_string(PathKind kind);

}  // namespace cavcoord
