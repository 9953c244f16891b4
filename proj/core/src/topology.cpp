#include "fogcache/topology.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "fogcache/error.hpp"
#include "fogcache/rng.hpp"

namespace fogcache {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Cell estimation

CellEstimate estimate_cell(std::string operator_name, std::string cell_id,
                           std::span<const LatLon> positions) {
  CellEstimate cell;
  cell.operator_name = std::move(operator_name);
  cell.cell_id = std::move(cell_id);
  cell.observation_count = positions.size();
  cell.hull = convex_hull({positions.begin(), positions.end()});
  if (cell.hull.size() >= 3) {
    cell.barycenter = polygon_centroid(cell.hull);
    cell.area_km2 = polygon_area_km2(cell.hull);
  } else {
    cell.barycenter = mean_position(positions);
    cell.area_km2 = 0.0;
  }
  return cell;
}

std::vector<CellEstimate> estimate_cells(std::span<const TraceRecord> records) {
  std::map<std::pair<std::string, std::string>, std::vector<LatLon>> observed;
  for (const auto& r : records) {
    if (!r.cell_id || r.cell_id->empty() || !is_valid(r.position)) continue;
    observed[{r.operator_name, *r.cell_id}].push_back(r.position);
  }
  std::vector<CellEstimate> cells;
  cells.reserve(observed.size());
  for (auto& [key, positions] : observed)
    cells.push_back(estimate_cell(key.first, key.second, positions));
  return cells;
}

// ---------------------------------------------------------------------------
// Levels

std::string_view to_string(Level level) noexcept {
  switch (level) {
    case Level::BaseStation: return "BaseStation";
    case Level::Ring: return "Ring";
    case Level::Pod: return "Pod";
    case Level::Core: return "Core";
  }
  return "BaseStation";
}

std::optional<Level> parse_level(std::string_view text) noexcept {
  for (auto level : kLevels)
    if (text == to_string(level)) return level;
  if (text == "bs" || text == "BS" || text == "base_station") return Level::BaseStation;
  if (text == "ring") return Level::Ring;
  if (text == "pod") return Level::Pod;
  if (text == "core") return Level::Core;
  return std::nullopt;
}

std::array<std::size_t, kLevelCount> expected_level_counts(std::size_t cells, std::size_t fanout) {
  std::array<std::size_t, kLevelCount> counts{};
  counts[0] = cells;
  for (std::size_t i = 1; i < kLevelCount; ++i) counts[i] = (counts[i - 1] + fanout - 1) / fanout;
  return counts;
}

// ---------------------------------------------------------------------------
// Topology

Topology Topology::from_nodes(std::string operator_name, std::vector<TopologyNode> nodes,
                              std::size_t fanout) {
  Topology t;
  t.operator_name_ = std::move(operator_name);
  t.fanout_ = fanout;
  t.nodes_ = std::move(nodes);
  t.level_pos_.resize(t.nodes_.size());

  const auto where = [&](NodeId id) {
    return "topology '" + t.operator_name_ + "' node " + std::to_string(id);
  };

  for (std::size_t i = 0; i < t.nodes_.size(); ++i) {
    const auto& n = t.nodes_[i];
    if (n.id != i) throw ValidationError(where(static_cast<NodeId>(i)) + ": ids must be dense");
    auto& bucket = t.by_level_[level_index(n.level)];
    t.level_pos_[i] = bucket.size();
    bucket.push_back(n.id);
  }
  if (t.by_level_[0].empty()) throw ValidationError("topology '" + t.operator_name_ + "' has no base stations");

  for (const auto& n : t.nodes_) {
    if (n.level == Level::Core) {
      if (n.parent) throw ValidationError(where(n.id) + ": core nodes have no parent");
    } else {
      if (!n.parent || *n.parent >= t.nodes_.size())
        throw ValidationError(where(n.id) + ": missing or unknown parent");
      const auto& p = t.nodes_[*n.parent];
      if (level_index(p.level) != level_index(n.level) + 1)
        throw ValidationError(where(n.id) + ": parent must be exactly one level up");
      if (std::count(p.children.begin(), p.children.end(), n.id) != 1)
        throw ValidationError(where(n.id) + ": parent does not list it as a child");
    }
    if (n.level == Level::BaseStation) {
      if (!n.children.empty()) throw ValidationError(where(n.id) + ": base stations are leaves");
      if (n.cell_id.empty()) throw ValidationError(where(n.id) + ": base station without cell id");
      if (!t.cell_index_.emplace(n.cell_id, n.id).second)
        throw ValidationError(where(n.id) + ": duplicate cell id " + n.cell_id);
    }
    if (fanout > 0 && n.children.size() > fanout)
      throw ValidationError(where(n.id) + ": more than " + std::to_string(fanout) + " children");
    for (NodeId c : n.children) {
      if (c >= t.nodes_.size() || t.nodes_[c].parent != n.id)
        throw ValidationError(where(n.id) + ": child link mismatch");
    }
  }

  t.ancestors_.reserve(t.by_level_[0].size());
  for (NodeId bs : t.by_level_[0]) {
    std::array<NodeId, kLevelCount> chain{};
    NodeId cur = bs;
    chain[0] = cur;
    for (std::size_t l = 1; l < kLevelCount; ++l) {
      cur = *t.nodes_[cur].parent;
      chain[l] = cur;
    }
    t.ancestors_.push_back(chain);
  }
  return t;
}

const TopologyNode& Topology::node(NodeId id) const {
  if (id >= nodes_.size())
    throw ValidationError("unknown node id " + std::to_string(id) + " in topology '" +
                          operator_name_ + "'");
  return nodes_[id];
}

std::array<std::size_t, kLevelCount> Topology::level_counts() const {
  std::array<std::size_t, kLevelCount> counts{};
  for (std::size_t l = 0; l < kLevelCount; ++l) counts[l] = by_level_[l].size();
  return counts;
}

std::size_t Topology::index_in_level(NodeId id) const {
  node(id);
  return level_pos_[id];
}

std::optional<NodeId> Topology::base_station_for(std::string_view cell_id) const {
  const auto it = cell_index_.find(std::string(cell_id));
  if (it == cell_index_.end()) return std::nullopt;
  return it->second;
}

NodeId Topology::ancestor(NodeId bs, Level level) const {
  const auto& n = node(bs);
  if (n.level != Level::BaseStation)
    throw ValidationError("node " + std::to_string(bs) + " is not a base station");
  return ancestors_[level_pos_[bs]][level_index(level)];
}

bool operator==(const Topology& a, const Topology& b) {
  if (a.operator_name_ != b.operator_name_ || a.fanout_ != b.fanout_ ||
      a.nodes_.size() != b.nodes_.size())
    return false;
  for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
    const auto& x = a.nodes_[i];
    const auto& y = b.nodes_[i];
    if (x.id != y.id || x.level != y.level || x.position != y.position || x.parent != y.parent ||
        x.children != y.children || x.cell_id != y.cell_id)
      return false;
  }
  return true;
}

NodeId ancestor_at_level(const Topology& topology, NodeId bs, Level level) {
  return topology.ancestor(bs, level);
}

// ---------------------------------------------------------------------------
// Tree construction

namespace {

std::vector<std::size_t> curve_order(std::span<const CellEstimate> cells) {
  double lat_min = cells[0].barycenter.lat, lat_max = lat_min;
  double lon_min = cells[0].barycenter.lon, lon_max = lon_min;
  for (const auto& c : cells) {
    lat_min = std::min(lat_min, c.barycenter.lat);
    lat_max = std::max(lat_max, c.barycenter.lat);
    lon_min = std::min(lon_min, c.barycenter.lon);
    lon_max = std::max(lon_max, c.barycenter.lon);
  }
  constexpr int kBits = 16;
  constexpr double kMaxCoord = (1u << kBits) - 1;
  auto quantize = [&](double v, double lo, double hi) -> std::uint32_t {
    if (hi <= lo) return 0;
    return static_cast<std::uint32_t>(std::lround((v - lo) / (hi - lo) * kMaxCoord));
  };
  std::vector<std::uint64_t> keys(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    keys[i] = hilbert_index(quantize(cells[i].barycenter.lon, lon_min, lon_max),
                            quantize(cells[i].barycenter.lat, lat_min, lat_max), kBits);
  }
  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a] != keys[b]) return keys[a] < keys[b];
    return cells[a].cell_id < cells[b].cell_id;
  });
  return order;
}

std::vector<std::size_t> shuffled_order(std::span<const CellEstimate> cells, std::uint64_t seed) {
  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return cells[a].cell_id < cells[b].cell_id; });
  Rng rng(derive_seed(seed, "topology/shuffle"));
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_index(i));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

}  // namespace

Topology build_tree(std::span<const CellEstimate> cells, const TreeOptions& options) {
  if (cells.empty()) throw ValidationError("cannot build a topology from an empty cell list");
  if (options.fanout < 1) throw ValidationError("fanout must be at least 1");
  const auto& op = cells.front().operator_name;
  for (const auto& c : cells) {
    if (c.operator_name != op)
      throw ValidationError("build_tree: cells span operators '" + op + "' and '" +
                            c.operator_name + "'");
  }

  const auto order = options.grouping == Grouping::Hilbert ? curve_order(cells)
                                                           : shuffled_order(cells, options.seed);

  std::vector<TopologyNode> nodes;
  const auto counts = expected_level_counts(cells.size(), options.fanout);
  nodes.reserve(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));

  std::vector<NodeId> current;
  for (std::size_t idx : order) {
    TopologyNode bs;
    bs.id = static_cast<NodeId>(nodes.size());
    bs.level = Level::BaseStation;
    bs.position = cells[idx].barycenter;
    bs.cell_id = cells[idx].cell_id;
    current.push_back(bs.id);
    nodes.push_back(std::move(bs));
  }

  for (std::size_t l = 1; l < kLevelCount; ++l) {
    std::vector<NodeId> next;
    for (std::size_t start = 0; start < current.size(); start += options.fanout) {
      const std::size_t end = std::min(current.size(), start + options.fanout);
      TopologyNode parent;
      parent.id = static_cast<NodeId>(nodes.size());
      parent.level = kLevels[l];
      std::vector<LatLon> child_positions;
      for (std::size_t i = start; i < end; ++i) {
        parent.children.push_back(current[i]);
        nodes[current[i]].parent = parent.id;
        child_positions.push_back(nodes[current[i]].position);
      }
      parent.position = mean_position(child_positions);
      next.push_back(parent.id);
      nodes.push_back(std::move(parent));
    }
    current = std::move(next);
  }

  return Topology::from_nodes(op, std::move(nodes), options.fanout);
}

std::vector<Topology> build_topologies(std::span<const CellEstimate> cells,
                                       const TreeOptions& options) {
  std::map<std::string, std::vector<CellEstimate>> by_operator;
  for (const auto& c : cells) by_operator[c.operator_name].push_back(c);
  std::vector<Topology> out;
  for (const auto& [op, group] : by_operator) out.push_back(build_tree(group, options));
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json topology_json(const Topology& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes()) {
    json j;
    j["id"] = n.id;
    j["level"] = to_string(n.level);
    j["parent"] = n.parent ? json(*n.parent) : json(nullptr);
    j["position"] = {n.position.lat, n.position.lon};
    j["children"] = n.children;
    if (n.level == Level::BaseStation) j["cell_id"] = n.cell_id;
    nodes.push_back(std::move(j));
  }
  const auto counts = t.level_counts();
  json level_counts;
  for (auto level : kLevels) level_counts[std::string(to_string(level))] = counts[level_index(level)];
  return {{"operator", t.operator_name()},
          {"fanout", t.fanout()},
          {"level_counts", level_counts},
          {"nodes", nodes}};
}

Topology topology_from(const json& j) {
  std::vector<TopologyNode> nodes;
  for (const auto& jn : j.at("nodes")) {
    TopologyNode n;
    n.id = jn.at("id").get<NodeId>();
    const auto level = parse_level(jn.at("level").get<std::string>());
    if (!level) throw ValidationError("unknown level " + jn.at("level").dump());
    n.level = *level;
    if (!jn.at("parent").is_null()) n.parent = jn.at("parent").get<NodeId>();
    n.position = {jn.at("position").at(0).get<double>(), jn.at("position").at(1).get<double>()};
    n.children = jn.at("children").get<std::vector<NodeId>>();
    if (jn.contains("cell_id")) n.cell_id = jn.at("cell_id").get<std::string>();
    nodes.push_back(std::move(n));
  }
  return Topology::from_nodes(j.at("operator").get<std::string>(), std::move(nodes),
                              j.value("fanout", std::size_t{0}));
}

}  // namespace

std::string topologies_to_json(std::span<const Topology> topologies) {
  json doc;
  doc["schema_version"] = 1;
  doc["topologies"] = json::array();
  for (const auto& t : topologies) doc["topologies"].push_back(topology_json(t));
  return doc.dump(1);
}

std::vector<Topology> topologies_from_json(std::string_view text) {
  try {
    const auto doc = json::parse(text);
    if (doc.value("schema_version", 0) != 1)
      throw ValidationError("unsupported topology schema_version");
    std::vector<Topology> out;
    for (const auto& j : doc.at("topologies")) out.push_back(topology_from(j));
    return out;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed topology JSON: ") + e.what());
  }
}

void save_topologies(const std::filesystem::path& path, std::span<const Topology> topologies) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << topologies_to_json(topologies) << '\n';
}

std::vector<Topology> load_topologies(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return topologies_from_json(buffer.str());
}

}  // namespace fogcache
