#include "fogcache/metrics.hpp"

#include <algorithm>

#include "fogcache/error.hpp"

namespace fogcache {

PriceOfFog price_of_fog(const CachePlan& plan_arch, const CachePlan& plan_core) {
  if (plan_core.architecture != Architecture::Core)
    throw ValidationError("price_of_fog needs a core-level reference plan");
  PriceOfFog pof;
  pof.architecture = plan_arch.architecture;
  pof.total_size_arch = plan_arch.total_size;
  pof.total_size_core = plan_core.total_size;
  if (plan_core.total_size > 0) {
    pof.value = static_cast<double>(plan_arch.total_size) / static_cast<double>(plan_core.total_size);
  }
  return pof;
}

DistanceReport mean_hit_distance(const CachePlan& plan, std::span<const Request> requests,
                                 const Topology& topology) {
  DistanceReport report;
  report.architecture = plan.architecture;
  const auto hops = static_cast<double>(level_index(plan.architecture));

  auto distance_for = [&](NodeId bs) {
    if (plan.architecture == Architecture::BaseStation) return 0.0;
    return great_circle_distance(topology.node(topology.ancestor(bs, plan.architecture)).position,
                                 topology.node(bs).position);
  };

  double sum = 0.0;
  for (const auto& r : requests) {
    if (!plan.served.contains({r.cell_id, r.item})) continue;
    const auto bs = topology.base_station_for(r.cell_id);
    if (!bs) continue;
    const auto it = plan.contents.find(topology.ancestor(*bs, plan.architecture));
    if (it == plan.contents.end() ||
        !std::binary_search(it->second.begin(), it->second.end(), r.item))
      continue;
    sum += distance_for(*bs);
    ++report.hits;
  }

  double item_sum = 0.0;
  std::size_t item_count = 0;
  for (const auto& [cell, item] : plan.served) {
    if (const auto bs = topology.base_station_for(cell)) {
      item_sum += distance_for(*bs);
      ++item_count;
    }
  }
  if (item_count > 0) report.mean_item_distance_km = item_sum / static_cast<double>(item_count);

  if (report.hits > 0) {
    const double mean = sum / static_cast<double>(report.hits);
    report.mean_hit_distance_km = mean;
    report.mean_hops = hops;
    report.per_operator[topology.operator_name()] = mean;
  }
  return report;
}

}  // namespace fogcache
