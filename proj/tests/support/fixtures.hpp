#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fogcache/cache.hpp"
#include "fogcache/demand.hpp"
#include "fogcache/geo.hpp"
#include "fogcache/synth.hpp"
#include "fogcache/sweep.hpp"
#include "fogcache/topology.hpp"

namespace fogcache::test {

// Builds a four-level tree by hand. Base stations get ids 0..n-1 and cell ids
// "bs1".."bsN"; rings, pods and cores follow in that order. Each group lists
// child indices within the level below. Inner positions are child means.
inline Topology tree_from_groups(const std::string& op, const std::vector<LatLon>& bs_positions,
                                 const std::vector<std::vector<std::size_t>>& rings,
                                 const std::vector<std::vector<std::size_t>>& pods,
                                 const std::vector<std::vector<std::size_t>>& cores) {
  std::vector<TopologyNode> nodes;
  for (std::size_t i = 0; i < bs_positions.size(); ++i) {
    TopologyNode n;
    n.id = static_cast<NodeId>(i);
    n.level = Level::BaseStation;
    n.position = bs_positions[i];
    n.cell_id = "bs" + std::to_string(i + 1);
    nodes.push_back(n);
  }
  std::size_t below_start = 0;
  auto add_level = [&](Level level, const std::vector<std::vector<std::size_t>>& groups) {
    const std::size_t start = nodes.size();
    for (std::size_t g = 0; g < groups.size(); ++g) {
      TopologyNode n;
      n.id = static_cast<NodeId>(start + g);
      n.level = level;
      std::vector<LatLon> child_positions;
      for (std::size_t c : groups[g]) {
        const auto child = static_cast<NodeId>(below_start + c);
        n.children.push_back(child);
        nodes[child].parent = n.id;
        child_positions.push_back(nodes[child].position);
      }
      n.position = mean_position(child_positions);
      nodes.push_back(n);
    }
    below_start = start;
  };
  add_level(Level::Ring, rings);
  add_level(Level::Pod, pods);
  add_level(Level::Core, cores);
  return Topology::from_nodes(op, std::move(nodes));
}

inline std::vector<LatLon> line_positions(std::size_t n) {
  std::vector<LatLon> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({34.0, -118.0 + 0.01 * static_cast<double>(i)});
  return out;
}

// One request (1 byte, YouTube) per listed (cell, item) pair.
inline std::vector<Request> one_request_per_pair(
    const std::string& op, const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::vector<Request> out;
  for (const auto& [cell, item] : pairs) {
    Request r;
    r.user_id = "u";
    r.day = "2015-10-01";
    r.cell_id = cell;
    r.operator_name = op;
    r.category = ContentCategory::YouTube;
    r.item = item;
    out.push_back(r);
  }
  return out;
}

// Five base stations: rings {bs1,bs2}, {bs3,bs4}, {bs5}; pods {R1,R2}, {R3};
// one core. Worthy items bs1={A}, bs2={B}, bs3={B}, bs4={C}, bs5={A,C}.
struct WorkedExample {
  Topology topology;
  std::vector<Request> requests;
};

inline WorkedExample worked_example() {
  WorkedExample w{tree_from_groups("op", line_positions(5), {{0, 1}, {2, 3}, {4}}, {{0, 1}, {2}},
                                   {{0, 1}}),
                  one_request_per_pair("op", {{"bs1", "A"},
                                              {"bs2", "B"},
                                              {"bs3", "B"},
                                              {"bs4", "C"},
                                              {"bs5", "A"},
                                              {"bs5", "C"}})};
  return w;
}

// Four base stations in rings {bs1,bs2} and {bs3,bs4}, one pod, one core;
// worthy sets bs1={A}, bs2={A,B}, bs3={B}, bs4={C}.
inline WorkedExample hand_instance() {
  WorkedExample w{tree_from_groups("op", line_positions(4), {{0, 1}, {2, 3}}, {{0, 1}}, {{0}}),
                  one_request_per_pair("op", {{"bs1", "A"},
                                              {"bs2", "A"},
                                              {"bs2", "B"},
                                              {"bs3", "B"},
                                              {"bs4", "C"}})};
  return w;
}

inline CachePlan plan_for(const WorkedExample& w, Architecture arch, double target = 1.0) {
  const auto worthy = mark_cache_worthy(tally_popularity(w.requests), target);
  return place_caches(worthy, w.topology, arch);
}

// Small synthetic scenario for property tests.
struct SmallScenarioOptions {
  std::size_t cells = 30;
  std::size_t users = 40;
  std::size_t hours = 2;
  std::size_t fanout = 10;
  DeploymentStyle style = DeploymentStyle::SparseLarge;
  std::uint64_t seed = 1;
  SizePolicy size_policy = SizePolicy::FirstDraw;
};

inline Scenario small_scenario(const SmallScenarioOptions& o) {
  SyntheticOptions so;
  so.operator_name = "op";
  so.n_cells = o.cells;
  so.n_users = o.users;
  so.hours = o.hours;
  so.style = o.style;
  so.size_policy = o.size_policy;
  DemandConfig dc;
  dc.seed = o.seed;
  dc.video_catalog_size = 20'000;
  auto generated = generate_synthetic_scenario(so, dc);
  Scenario s;
  TreeOptions t;
  t.fanout = o.fanout;
  t.seed = o.seed;
  s.topologies = build_topologies(generated.cells, t);
  s.requests = std::move(generated.requests);
  s.catalog = std::move(generated.catalog);
  s.size_policy = o.size_policy;
  return s;
}

}  // namespace fogcache::test
