#include "fogcache/cache.hpp"

#include <algorithm>
#include <unordered_map>

#include <json.hpp>

#include "fogcache/error.hpp"

namespace fogcache {

std::string_view to_string(Weighting weighting) noexcept {
  return weighting == Weighting::Requests ? "requests" : "bytes";
}

std::optional<Weighting> parse_weighting(std::string_view text) noexcept {
  if (text == "requests") return Weighting::Requests;
  if (text == "bytes") return Weighting::Bytes;
  return std::nullopt;
}

std::vector<PairPopularity> tally_popularity(std::span<const Request> requests) {
  std::map<std::pair<std::string, std::string>, PairPopularity> pairs;
  for (const auto& r : requests) {
    auto [it, fresh] = pairs.try_emplace({r.cell_id, r.item});
    auto& p = it->second;
    if (fresh) {
      p.item = r.item;
      p.cell = r.cell_id;
      p.cacheable = is_cacheable(r.category);
    }
    p.request_count += 1;
    p.byte_count += r.bytes;
  }
  std::vector<PairPopularity> out;
  out.reserve(pairs.size());
  for (auto& [key, p] : pairs) out.push_back(std::move(p));
  return out;
}

CacheWorthySet mark_cache_worthy(std::vector<PairPopularity> pairs, double target,
                                 const MarkOptions& options) {
  if (!(target >= 0.0 && target <= 1.0))
    throw ValidationError("target hit ratio must be in [0, 1]");
  const auto w = options.weighting;

  CacheWorthySet set;
  set.target = target;
  set.weighting = w;
  for (const auto& p : pairs) set.total_weight += p.weight(w);

  if (options.exclude_non_cacheable) {
    std::erase_if(pairs, [](const PairPopularity& p) { return !p.cacheable; });
  }
  std::sort(pairs.begin(), pairs.end(), [w](const PairPopularity& a, const PairPopularity& b) {
    const auto wa = a.weight(w);
    const auto wb = b.weight(w);
    if (wa != wb) return wa > wb;
    if (a.cell != b.cell) return a.cell < b.cell;
    return a.item < b.item;
  });

  const auto share = [&](std::uint64_t weight) {
    return set.total_weight == 0 ? 0.0
                                 : static_cast<double>(weight) /
                                       static_cast<double>(set.total_weight);
  };

  if (target > 0.0) {
    for (auto& p : pairs) {
      set.marked_weight += p.weight(w);
      if (!p.cacheable) set.non_cacheable_marked = true;
      set.pairs.push_back(std::move(p));
      if (share(set.marked_weight) >= target) break;
    }
  }
  set.achieved = share(set.marked_weight);
  set.infeasible = set.achieved < target;
  return set;
}

CachePlan place_caches(const CacheWorthySet& worthy, const Topology& topology,
                       Architecture architecture, const ItemSizes* sizes) {
  CachePlan plan;
  plan.architecture = architecture;
  plan.weighting = worthy.weighting;

  std::map<NodeId, std::set<std::string>> contents;
  for (const auto& p : worthy.pairs) {
    const auto bs = topology.base_station_for(p.cell);
    if (!bs)
      throw ValidationError("cell '" + p.cell + "' has no base station in topology '" +
                            topology.operator_name() + "'");
    contents[topology.ancestor(*bs, architecture)].insert(p.item);
    plan.served.emplace(p.cell, p.item);
  }

  for (auto& [node, items] : contents) {
    std::uint64_t node_size = 0;
    for (const auto& item : items) {
      if (!sizes) {
        node_size += 1;
        continue;
      }
      const auto it = sizes->find(item);
      if (it == sizes->end()) throw ValidationError("no size known for item '" + item + "'");
      node_size += it->second;
    }
    plan.node_sizes[node] = node_size;
    plan.total_size += node_size;
    plan.total_items += items.size();
    plan.contents[node] = {items.begin(), items.end()};
  }
  return plan;
}

double achieved_hit_ratio(const CachePlan& plan, std::span<const Request> requests,
                          const Topology& topology) {
  std::uint64_t total = 0;
  std::uint64_t hits = 0;
  for (const auto& r : requests) {
    const std::uint64_t weight = plan.weighting == Weighting::Requests ? 1 : r.bytes;
    total += weight;
    if (!plan.served.contains({r.cell_id, r.item})) continue;
    const auto bs = topology.base_station_for(r.cell_id);
    if (!bs) continue;
    const auto it = plan.contents.find(topology.ancestor(*bs, plan.architecture));
    if (it == plan.contents.end()) continue;
    if (std::binary_search(it->second.begin(), it->second.end(), r.item)) hits += weight;
  }
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

PlanSummary summarize(const CachePlan& plan, const Topology& topology) {
  PlanSummary s;
  s.architecture = plan.architecture;
  s.total_size = plan.total_size;
  s.total_items = plan.total_items;
  const auto nodes = topology.nodes_at(plan.architecture);
  s.node_count = nodes.size();
  std::vector<std::uint64_t> sizes;
  sizes.reserve(nodes.size());
  for (NodeId id : nodes) {
    const auto it = plan.node_sizes.find(id);
    sizes.push_back(it == plan.node_sizes.end() ? 0 : it->second);
  }
  if (sizes.empty()) return s;
  std::sort(sizes.begin(), sizes.end());
  s.min_node_size = sizes.front();
  s.max_node_size = sizes.back();
  const auto mid = sizes.size() / 2;
  s.median_node_size = sizes.size() % 2 ? static_cast<double>(sizes[mid])
                                        : (static_cast<double>(sizes[mid - 1]) +
                                           static_cast<double>(sizes[mid])) / 2.0;
  return s;
}

std::string plan_to_json(const CachePlan& plan, const Topology& topology) {
  nlohmann::json doc;
  doc["operator"] = topology.operator_name();
  doc["architecture"] = to_string(plan.architecture);
  doc["weighting"] = to_string(plan.weighting);
  doc["total_size"] = plan.total_size;
  doc["total_items"] = plan.total_items;
  doc["nodes"] = nlohmann::json::array();
  for (const auto& [node, items] : plan.contents) {
    doc["nodes"].push_back({{"node", node}, {"size", plan.node_sizes.at(node)}, {"items", items}});
  }
  return doc.dump(1);
}

}  // namespace fogcache
