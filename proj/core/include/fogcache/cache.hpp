#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fogcache/demand.hpp"
#include "fogcache/topology.hpp"

namespace fogcache {

// Where caches live. Shares the tree's level enumeration, ordered from the
// edge (BaseStation) to the most centralized (Core).
using Architecture = Level;

enum class Weighting { Requests, Bytes };

std::string_view to_string(Weighting weighting) noexcept;
std::optional<Weighting> parse_weighting(std::string_view text) noexcept;

struct PairPopularity {
  std::string item;
  std::string cell;
  std::uint64_t request_count = 0;
  std::uint64_t byte_count = 0;
  bool cacheable = true;

  std::uint64_t weight(Weighting w) const {
    return w == Weighting::Requests ? request_count : byte_count;
  }
  friend bool operator==(const PairPopularity&, const PairPopularity&) = default;
};

// Exact per-(item, cell) counts, sorted by (cell, item). Callers evaluate one
// operator at a time, so cell ids are unique within the input.
std::vector<PairPopularity> tally_popularity(std::span<const Request> requests);

struct MarkOptions {
  Weighting weighting = Weighting::Requests;
  bool exclude_non_cacheable = false;
};

struct CacheWorthySet {
  double target = 0.0;
  Weighting weighting = Weighting::Requests;
  std::vector<PairPopularity> pairs;  // marking order
  std::uint64_t marked_weight = 0;
  std::uint64_t total_weight = 0;
  double achieved = 0.0;
  bool infeasible = false;            // target above the reachable mass
  bool non_cacheable_marked = false;  // a RealTime/Players pair had to be marked
};

// Sorts pairs by decreasing weight (ties: ascending cell, then item) and marks
// the shortest prefix whose weight share reaches `target`.
CacheWorthySet mark_cache_worthy(std::vector<PairPopularity> pairs, double target,
                                 const MarkOptions& options = {});

struct CachePlan {
  Architecture architecture = Architecture::BaseStation;
  Weighting weighting = Weighting::Requests;
  std::map<NodeId, std::vector<std::string>> contents;  // sorted, distinct
  std::map<NodeId, std::uint64_t> node_sizes;
  std::uint64_t total_size = 0;
  std::size_t total_items = 0;
  std::set<std::pair<std::string, std::string>> served;  // marked (cell, item)
};

// One copy of each marked item at the node responsible for its cell under
// `architecture`. Null `sizes` means unit sizes. Throws ValidationError for
// cells absent from the topology or items absent from `sizes`.
CachePlan place_caches(const CacheWorthySet& worthy, const Topology& topology,
                       Architecture architecture, const ItemSizes* sizes = nullptr);

// Share of `requests` (weighted like the plan) served by the plan: the item
// is cached at the node responsible for the request's cell and the (cell,
// item) pair was marked. Sibling cells get no bonus hits.
double achieved_hit_ratio(const CachePlan& plan, std::span<const Request> requests,
                          const Topology& topology);

struct PlanSummary {
  Architecture architecture = Architecture::BaseStation;
  std::uint64_t total_size = 0;
  std::size_t total_items = 0;
  std::size_t node_count = 0;  // all nodes at the level, including empty caches
  std::uint64_t min_node_size = 0;
  double median_node_size = 0.0;
  std::uint64_t max_node_size = 0;
};

PlanSummary summarize(const CachePlan& plan, const Topology& topology);

// {"architecture":..,"operator":..,"total_size":..,"nodes":[{"node":id,
// "size":..,"items":[..]}]}
std::string plan_to_json(const CachePlan& plan, const Topology& topology);

}  // namespace fogcache
