#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "cavcoord/errors.hpp"
#include "cavcoord/geometry.hpp"

using namespace cavcoord;

namespace {

const std::filesystem::path kData{CAVCOORD_DATA_DIR};

nlohmann::json shipped_geometry() {
  std::ifstream in(kData / "default_geometry.json");
  return nlohmann::json::parse(in);
}

}  // namespace

TEST(Geometry, ShippedDefaultHasSixPaths) {
  const auto g = load_geometry_file(kData / "default_geometry.json");
  ASSERT_EQ(g.paths().size(), 6u);
  for (const auto& p : g.paths())
    EXPECT_DOUBLE_EQ(p.length, p.kind == PathKind::straight ? 212.0 : 215.0);
}

TEST(Geometry, ConflictBeyondPathEndIsRejected) {
  const char* text = R"({"paths":[{"id":1,"length_m":212},{"id":2,"length_m":212}],
    "conflicts":[{"id":1,"locations":[{"path_id":1,"distance_m":300},{"path_id":2,"distance_m":100}]}]})";
  try {
    load_geometry(text);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("conflict 1"), std::string::npos) << e.what();
  }
}

TEST(Geometry, SinglePathNoConflicts) {
  const auto g = load_geometry(R"({"paths":[{"id":7,"length_m":150}],"conflicts":[]})");
  EXPECT_EQ(g.paths().size(), 1u);
  EXPECT_TRUE(g.conflicts_between(7, 7).empty());
}

TEST(Geometry, InvalidDocuments) {
  EXPECT_THROW(load_geometry("{not json"), ConfigError);
  EXPECT_THROW(load_geometry(R"({"paths":[]})"), ConfigError);
  EXPECT_THROW(load_geometry(R"({"paths":[{"id":1,"length_m":-3}],"conflicts":[]})"),
               ConfigError);
  EXPECT_THROW(load_geometry(R"({"paths":[{"id":1,"length_m":10},{"id":1,"length_m":10}],
                                "conflicts":[]})"),
               ConfigError);
  // only one path listed
  EXPECT_THROW(load_geometry(R"({"paths":[{"id":1,"length_m":10},{"id":2,"length_m":10}],
      "conflicts":[{"id":1,"locations":[{"path_id":1,"distance_m":5}]}]})"),
               ConfigError);
  // duplicate of an existing crossing
  EXPECT_THROW(load_geometry(R"({"paths":[{"id":1,"length_m":10},{"id":2,"length_m":10}],
      "conflicts":[{"id":1,"locations":[{"path_id":1,"distance_m":5},{"path_id":2,"distance_m":4}]},
                   {"id":2,"locations":[{"path_id":1,"distance_m":5},{"path_id":2,"distance_m":4}]}]})"),
               ConfigError);
  EXPECT_THROW(load_geometry(R"({"paths":[{"id":1,"length_m":10}],
      "conflicts":[{"id":1,"locations":[{"path_id":1,"distance_m":5},{"path_id":9,"distance_m":4}]}]})"),
               ConfigError);
}

TEST(Geometry, ConflictsBetweenSamePathIsEmpty) {
  const auto g = load_geometry_file(kData / "default_geometry.json");
  EXPECT_TRUE(g.conflicts_between(1, 1).empty());
}

TEST(Geometry, ConflictsBetweenUnknownPathThrows) {
  const auto g = load_geometry_file(kData / "default_geometry.json");
  EXPECT_THROW(g.conflicts_between(1, 42), std::out_of_range);
}

TEST(Geometry, NonCrossingPathsHaveNoConflicts) {
  // Opposite straights run side by side.
  const auto g = load_geometry_file(kData / "default_geometry.json");
  EXPECT_TRUE(g.conflicts_between(1, 2).empty());
  EXPECT_TRUE(g.conflicts_between(3, 4).empty());
}

TEST(Geometry, CrossingPairMatchesFile) {
  const auto g = load_geometry_file(kData / "default_geometry.json");
  const auto doc = shipped_geometry();
  for (const auto& c : doc["conflicts"]) {
    const auto& loc = c["locations"];
    const int a = loc[0]["path_id"];
    const int b = loc[1]["path_id"];
    const auto found = g.conflicts_between(a, b);
    const auto it = std::find_if(found.begin(), found.end(),
                                 [&](const auto& x) { return x.conflict_id == c["id"]; });
    ASSERT_NE(it, found.end());
    EXPECT_EQ(it->distance_on_a, loc[0]["distance_m"].get<double>());
    EXPECT_EQ(it->distance_on_b, loc[1]["distance_m"].get<double>());
  }
  const auto east_north = g.conflicts_between(1, 3);
  ASSERT_EQ(east_north.size(), 1u);
  EXPECT_EQ(east_north[0], (ConflictCrossing{1, 111.25, 100.75}));
}

TEST(GeometryProperty, SymmetricAndInsideBothPaths) {
  const auto g = load_geometry_file(kData / "default_geometry.json");
  for (const auto& pa : g.paths())
    for (const auto& pb : g.paths()) {
      const auto ab = g.conflicts_between(pa.id, pb.id);
      const auto ba = g.conflicts_between(pb.id, pa.id);
      ASSERT_EQ(ab.size(), ba.size());
      for (std::size_t i = 0; i < ab.size(); ++i) {
        EXPECT_EQ(ab[i].conflict_id, ba[i].conflict_id);
        EXPECT_EQ(ab[i].distance_on_a, ba[i].distance_on_b);
        EXPECT_EQ(ab[i].distance_on_b, ba[i].distance_on_a);
        EXPECT_GT(ab[i].distance_on_a, 0.0);
        EXPECT_LT(ab[i].distance_on_a, pa.length);
        EXPECT_GT(ab[i].distance_on_b, 0.0);
        EXPECT_LT(ab[i].distance_on_b, pb.length);
        if (i > 0) EXPECT_LT(ab[i - 1].conflict_id, ab[i].conflict_id);
      }
      EXPECT_EQ(g.crossings(pa.id, pb.id), ab);
    }
}

TEST(Geometry, SortedByIdAndRoundTrips) {
  const auto g = load_geometry(R"({"paths":[{"id":2,"length_m":50},{"id":1,"length_m":40}],
      "conflicts":[{"id":9,"locations":[{"path_id":2,"distance_m":20},{"path_id":1,"distance_m":10}]},
                   {"id":3,"locations":[{"path_id":1,"distance_m":30},{"path_id":2,"distance_m":5}]}]})");
  EXPECT_EQ(g.paths()[0].id, 1);
  EXPECT_EQ(g.conflicts()[0].id, 3);
  const auto again = geometry_from_json(g.to_json());
  EXPECT_EQ(again.to_json(), g.to_json());
  const auto x = g.conflicts_between(1, 2);
  ASSERT_EQ(x.size(), 2u);
  EXPECT_EQ(x[0].conflict_id, 3);
  EXPECT_EQ(x[1], (ConflictCrossing{9, 10.0, 20.0}));
}
