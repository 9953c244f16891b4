#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fogcache/geo.hpp"
#include "fogcache/trace.hpp"

namespace fogcache {

// Estimated coverage of one cell, from the positions of users reporting it.
struct CellEstimate {
  std::string operator_name;
  std::string cell_id;
  std::vector<LatLon> hull;  // CCW convex polygon; 1-2 vertices if degenerate
  LatLon barycenter;
  double area_km2 = 0.0;
  std::size_t observation_count = 0;
};

// One estimate per distinct (operator, cell_id), sorted by that key. Records
// without a cell id or with invalid coordinates are ignored.
std::vector<CellEstimate> estimate_cells(std::span<const TraceRecord> records);

// Estimate for a single cell from its observed positions.
CellEstimate estimate_cell(std::string operator_name, std::string cell_id,
                           std::span<const LatLon> positions);

// Tree levels, from the edge to the most centralized switch. Caching
// architectures use the same enumeration.
enum class Level : std::uint8_t { BaseStation = 0, Ring = 1, Pod = 2, Core = 3 };

inline constexpr std::array kLevels = {Level::BaseStation, Level::Ring, Level::Pod, Level::Core};
inline constexpr std::size_t kLevelCount = kLevels.size();

std::string_view to_string(Level level) noexcept;
std::optional<Level> parse_level(std::string_view text) noexcept;
constexpr std::size_t level_index(Level level) noexcept { return static_cast<std::size_t>(level); }

using NodeId = std::uint32_t;

struct TopologyNode {
  NodeId id = 0;
  Level level = Level::BaseStation;
  LatLon position;
  std::optional<NodeId> parent;
  std::vector<NodeId> children;
  std::string cell_id;  // base stations only
};

enum class Grouping { Hilbert, Random };

struct TreeOptions {
  std::size_t fanout = 10;
  Grouping grouping = Grouping::Hilbert;
  std::uint64_t seed = 0;
};

// Four-level tree for one operator: base stations, rings, pods, core switches.
// Immutable once built; node ids index nodes().
class Topology {
 public:
  // Validates structure: dense ids in vector order, base stations are leaves
  // with unique cell ids, each non-core node has exactly one parent one level
  // up, parent/children links agree, core nodes have no parent, and every
  // parent has at most `fanout` children when fanout > 0.
  static Topology from_nodes(std::string operator_name, std::vector<TopologyNode> nodes,
                             std::size_t fanout = 0);

  const std::string& operator_name() const { return operator_name_; }
  std::size_t fanout() const { return fanout_; }

  std::span<const TopologyNode> nodes() const { return nodes_; }
  const TopologyNode& node(NodeId id) const;

  std::span<const NodeId> nodes_at(Level level) const { return by_level_[level_index(level)]; }
  std::size_t count(Level level) const { return nodes_at(level).size(); }
  std::array<std::size_t, kLevelCount> level_counts() const;

  // Position of the node within its level, in id order.
  std::size_t index_in_level(NodeId id) const;

  std::optional<NodeId> base_station_for(std::string_view cell_id) const;

  // `bs` itself for Level::BaseStation, otherwise its unique ancestor.
  // Throws ValidationError for unknown ids or non-base-station nodes.
  NodeId ancestor(NodeId bs, Level level) const;

  friend bool operator==(const Topology& a, const Topology& b);

 private:
  std::string operator_name_;
  std::size_t fanout_ = 0;
  std::vector<TopologyNode> nodes_;
  std::array<std::vector<NodeId>, kLevelCount> by_level_;
  std::vector<std::size_t> level_pos_;
  std::vector<std::array<NodeId, kLevelCount>> ancestors_;  // indexed by BS position
  std::unordered_map<std::string, NodeId> cell_index_;
};

// Orders base stations along a space-filling curve over their barycenters
// (or a seeded shuffle for Grouping::Random) and chunks them into
// consecutive groups of `fanout`; the same chunking builds pods from rings and
// cores from pods. Inner node positions are the mean of their children's.
// All cells must belong to one operator.
Topology build_tree(std::span<const CellEstimate> cells, const TreeOptions& options = {});

// One topology per operator, sorted by operator name.
std::vector<Topology> build_topologies(std::span<const CellEstimate> cells,
                                       const TreeOptions& options = {});

NodeId ancestor_at_level(const Topology& topology, NodeId bs, Level level);

// ceil-division counts implied by `cells` base stations and `fanout`.
std::array<std::size_t, kLevelCount> expected_level_counts(std::size_t cells, std::size_t fanout);

// JSON document {"schema_version":1,"topologies":[...]} with per-node
// id, level, parent, position [lat, lon], children and cell_id.
void save_topologies(const std::filesystem::path& path, std::span<const Topology> topologies);
std::vector<Topology> load_topologies(const std::filesystem::path& path);

std::string topologies_to_json(std::span<const Topology> topologies);
std::vector<Topology> topologies_from_json(std::string_view text);

}  // namespace fogcache
