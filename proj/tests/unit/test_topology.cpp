#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <random>

#include "fixtures.hpp"
#include "fogcache/error.hpp"
#include "fogcache/topology.hpp"

using namespace fogcache;

namespace {

std::vector<CellEstimate> random_cells(std::size_t n, std::uint64_t seed, const std::string& op = "op") {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> lat(33.7, 34.3);
  std::uniform_real_distribution<double> lon(-118.7, -117.9);
  std::vector<CellEstimate> cells;
  for (std::size_t i = 0; i < n; ++i) {
    CellEstimate c;
    c.operator_name = op;
    char id[32];
    std::snprintf(id, sizeof(id), "c%06zu", i);
    c.cell_id = id;
    c.barycenter = {lat(gen), lon(gen)};
    c.hull = {c.barycenter};
    c.observation_count = 1;
    cells.push_back(c);
  }
  return cells;
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

}  // namespace

TEST_CASE("estimate_cells examples") {
  auto record = [](std::string cell, double lat, double lon) {
    TraceRecord r;
    r.day = "2015-10-01";
    r.user_id = "u";
    r.operator_name = "Op";
    r.cell_id = std::move(cell);
    r.position = {lat, lon};
    return r;
  };
  const std::vector<TraceRecord> records = {
      record("single", 34.05, -118.25),
      record("square", 0, 0), record("square", 0, 1), record("square", 1, 0), record("square", 1, 1),
      record("tri", 0, 0), record("tri", 2, 0), record("tri", 0, 2),
  };
  const auto cells = estimate_cells(records);
  REQUIRE(cells.size() == 3);
  // Sorted by (operator, cell id).
  CHECK(cells[0].cell_id == "single");
  CHECK(cells[0].barycenter == LatLon{34.05, -118.25});
  CHECK(cells[0].area_km2 == 0.0);
  CHECK(cells[0].hull.size() == 1);

  CHECK(cells[1].cell_id == "square");
  CHECK(cells[1].barycenter.lat == doctest::Approx(0.5));
  CHECK(cells[1].barycenter.lon == doctest::Approx(0.5));
  CHECK(cells[1].observation_count == 4);
  CHECK(cells[1].area_km2 > 0.0);

  CHECK(cells[2].barycenter.lat == doctest::Approx(2.0 / 3.0));
  CHECK(cells[2].barycenter.lon == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("estimate_cells ignores records without a cell and keeps positions inside hulls") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> d(0.0, 0.01);
  std::vector<TraceRecord> records;
  for (int i = 0; i < 400; ++i) {
    TraceRecord r;
    r.operator_name = i % 2 ? "A" : "B";
    if (i % 7 != 0) r.cell_id = "c" + std::to_string(i % 5);
    r.position = {34.0 + d(gen), -118.0 + d(gen)};
    records.push_back(r);
  }
  const auto cells = estimate_cells(records);
  CHECK(cells.size() == 10);
  for (const auto& c : cells) {
    CHECK(convex_contains(c.hull, c.barycenter));
    for (const auto& r : records) {
      if (r.cell_id == c.cell_id && r.operator_name == c.operator_name)
        CHECK(convex_contains(c.hull, r.position));
    }
  }
}

TEST_CASE("build_tree level counts") {
  SUBCASE("3882 cells, fanout 10") {
    const auto t = build_tree(random_cells(3882, 1), {10});
    CHECK(t.level_counts() == std::array<std::size_t, 4>{3882, 389, 39, 4});
  }
  SUBCASE("one cell") {
    const auto t = build_tree(random_cells(1, 1), {10});
    CHECK(t.level_counts() == std::array<std::size_t, 4>{1, 1, 1, 1});
    const NodeId bs = t.nodes_at(Level::BaseStation)[0];
    CHECK(ancestor_at_level(t, bs, Level::Core) == t.nodes_at(Level::Core)[0]);
  }
  SUBCASE("100 cells") {
    const auto t = build_tree(random_cells(100, 1), {10});
    CHECK(t.level_counts() == std::array<std::size_t, 4>{100, 10, 1, 1});
    // Base stations are numbered in curve order, so index 37 sits in ring 3.
    const NodeId bs = t.nodes_at(Level::BaseStation)[37];
    CHECK(t.index_in_level(ancestor_at_level(t, bs, Level::Ring)) == 3);
    CHECK(ancestor_at_level(t, bs, Level::BaseStation) == bs);
  }
  CHECK_THROWS_AS(build_tree({}, {10}), ValidationError);
  CHECK_THROWS_AS(build_tree(random_cells(3, 1), {0}), ValidationError);
}

TEST_CASE("level counts follow the ceil recurrence for random sizes") {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<std::size_t> size(1, 2500);
  std::uniform_int_distribution<std::size_t> fan(1, 16);
  for (int trial = 0; trial < 60; ++trial) {
    const auto n = size(gen);
    const auto f = fan(gen);
    const auto t = build_tree(random_cells(n, trial), {f});
    const auto counts = t.level_counts();
    CHECK(counts[0] == n);
    CHECK(counts[1] == ceil_div(counts[0], f));
    CHECK(counts[2] == ceil_div(counts[1], f));
    CHECK(counts[3] == ceil_div(counts[2], f));
    CHECK(counts == expected_level_counts(n, f));
    for (const auto& node : t.nodes()) CHECK(node.children.size() <= f);
  }
}

TEST_CASE("ancestors agree with parent pointers and positions are child means") {
  for (auto grouping : {Grouping::Hilbert, Grouping::Random}) {
    const auto t = build_tree(random_cells(537, 5), {7, grouping, 99});
    for (NodeId bs : t.nodes_at(Level::BaseStation)) {
      NodeId walk = bs;
      for (std::size_t l = 1; l < kLevelCount; ++l) {
        walk = *t.node(walk).parent;
        CHECK(t.node(walk).level == kLevels[l]);
        CHECK(ancestor_at_level(t, bs, kLevels[l]) == walk);
      }
      CHECK_FALSE(t.node(walk).parent.has_value());
      CHECK(t.node(bs).children.empty());
    }
    for (const auto& node : t.nodes()) {
      if (node.level == Level::BaseStation) continue;
      std::vector<LatLon> kids;
      for (NodeId c : node.children) kids.push_back(t.node(c).position);
      const auto mean = mean_position(kids);
      CHECK(node.position.lat == doctest::Approx(mean.lat).epsilon(1e-12));
      CHECK(node.position.lon == doctest::Approx(mean.lon).epsilon(1e-12));
    }
  }
}

TEST_CASE("ancestor lookups reject unknown or inner nodes") {
  const auto t = build_tree(random_cells(20, 2), {10});
  CHECK_THROWS_AS(ancestor_at_level(t, 10'000, Level::Ring), ValidationError);
  const NodeId ring = t.nodes_at(Level::Ring)[0];
  CHECK_THROWS_AS(ancestor_at_level(t, ring, Level::Core), ValidationError);
}

TEST_CASE("build_tree is deterministic and hilbert rings are compact") {
  const auto cells = random_cells(1000, 8);
  const auto a = build_tree(cells, {10, Grouping::Hilbert, 1});
  const auto b = build_tree(cells, {10, Grouping::Hilbert, 1});
  CHECK(a == b);
  const auto r1 = build_tree(cells, {10, Grouping::Random, 1});
  const auto r2 = build_tree(cells, {10, Grouping::Random, 1});
  CHECK(r1 == r2);

  // Curve ordering keeps ring members closer to their ring than a shuffle does.
  auto mean_ring_distance = [](const Topology& t) {
    double sum = 0.0;
    for (NodeId bs : t.nodes_at(Level::BaseStation))
      sum += great_circle_distance(t.node(bs).position,
                                   t.node(t.ancestor(bs, Level::Ring)).position);
    return sum / static_cast<double>(t.count(Level::BaseStation));
  };
  CHECK(mean_ring_distance(a) < 0.5 * mean_ring_distance(r1));
}

TEST_CASE("build_topologies separates operators") {
  auto cells = random_cells(30, 4, "Verizon");
  const auto more = random_cells(12, 5, "ATT");
  cells.insert(cells.end(), more.begin(), more.end());
  const auto topologies = build_topologies(cells, {10});
  REQUIRE(topologies.size() == 2);
  CHECK(topologies[0].operator_name() == "ATT");
  CHECK(topologies[0].level_counts() == std::array<std::size_t, 4>{12, 2, 1, 1});
  CHECK(topologies[1].level_counts() == std::array<std::size_t, 4>{30, 3, 1, 1});
  CHECK_THROWS_AS(build_tree(cells, {10}), ValidationError);
}

TEST_CASE("topology JSON round trip") {
  auto cells = random_cells(57, 4, "B");
  const auto more = random_cells(5, 5, "A");
  cells.insert(cells.end(), more.begin(), more.end());
  const auto topologies = build_topologies(cells, {4});
  const auto text = topologies_to_json(topologies);
  CHECK(text.find("\"schema_version\"") != std::string::npos);
  const auto back = topologies_from_json(text);
  REQUIRE(back.size() == topologies.size());
  for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == topologies[i]);

  const auto path = std::filesystem::temp_directory_path() / "fogcache_topology.json";
  save_topologies(path, topologies);
  CHECK(load_topologies(path).size() == 2);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(topologies_from_json("{\"topologies\": 3}"), ValidationError);
}

TEST_CASE("hand-built trees validate their structure") {
  const auto w = test::worked_example();
  CHECK(w.topology.level_counts() == std::array<std::size_t, 4>{5, 3, 2, 1});
  CHECK(w.topology.base_station_for("bs5").has_value());
  CHECK_FALSE(w.topology.base_station_for("nope").has_value());

  // A base station with a child is rejected.
  std::vector<TopologyNode> nodes(2);
  nodes[0].id = 0;
  nodes[0].cell_id = "a";
  nodes[0].children = {1};
  nodes[1].id = 1;
  nodes[1].level = Level::Core;
  CHECK_THROWS_AS(Topology::from_nodes("x", nodes), ValidationError);
}
