#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>

#include "fogcache/cache.hpp"

namespace fogcache {

// Total cache size under an architecture relative to the core-switch total
// for the same cache-worthy set.
struct PriceOfFog {
  Architecture architecture = Architecture::BaseStation;
  std::uint64_t total_size_arch = 0;
  std::uint64_t total_size_core = 0;
  std::optional<double> value;  // nullopt when the core total is zero
};

// Throws ValidationError unless `plan_core` is a Core plan.
PriceOfFog price_of_fog(const CachePlan& plan_arch, const CachePlan& plan_core);

struct DistanceReport {
  Architecture architecture = Architecture::BaseStation;
  // Mean over hit requests of the distance from the caching node to the
  // serving base station; nullopt when nothing hits.
  std::optional<double> mean_hit_distance_km;
  // Same distance averaged over distinct marked (cell, item) pairs.
  std::optional<double> mean_item_distance_km;
  double mean_hops = 0.0;  // tree hops from base station to caching node
  std::size_t hits = 0;
  std::map<std::string, double> per_operator;

  bool zero_hits() const { return hits == 0; }
};

DistanceReport mean_hit_distance(const CachePlan& plan, std::span<const Request> requests,
                                 const Topology& topology);

}  // namespace fogcache
