#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fogcache/rng.hpp"
#include "fogcache/trace.hpp"

namespace fogcache {

struct ContentItem {
  std::string item_id;
  ContentCategory category = ContentCategory::Other;
  std::uint64_t size_bytes = 1;
  std::optional<std::string> local_to;  // "<operator>/<cell>" for location-specific items

  friend bool operator==(const ContentItem&, const ContentItem&) = default;
};

struct Request {
  std::string user_id;
  std::string day;
  int hour = 0;
  std::string cell_id;
  std::string operator_name;
  ContentCategory category = ContentCategory::Other;
  std::string item;  // empty until assign_content_ids
  std::uint64_t bytes = 1;

  friend bool operator==(const Request&, const Request&) = default;
};

struct CellKey {
  std::string operator_name;
  std::string cell_id;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct DemandConfig {
  double zipf_exponent = 0.8;
  std::size_t video_catalog_size = 1'000'000;
  std::size_t popular_pool_size = 50;
  double popular_hit_prob = 0.9;
  std::size_t local_pool_size = 10;
  double local_hit_prob = 0.9;
  double rec_top_fraction = 0.05;
  double rec_prob = 0.0;  // p
  std::size_t local_items_per_cell = 5;
  double loc_prob = 0.0;  // q
  std::uint64_t seed = 1;
};

// Throws ValidationError naming the first offending field.
void validate(const DemandConfig& config);

// Popularity distribution for YouTube/OnDemand draws: either a Zipf law over
// ranks 1..N or empirical (item, weight) pairs.
class VideoCatalog {
 public:
  static VideoCatalog zipf(double exponent, std::size_t size);
  static VideoCatalog from_weights(std::vector<std::pair<std::string, double>> weights);
  // CSV `item,weight` (header optional, '#' comments allowed).
  static VideoCatalog load(const std::filesystem::path& path);

  std::size_t size() const { return cdf_.size(); }
  // 0-based rank index.
  std::size_t sample(Rng& rng) const;
  double probability(std::size_t index) const;
  // Stable label for rank `index`: "v<index+1>" for Zipf catalogs.
  std::string label(std::size_t index) const;

 private:
  std::vector<double> cdf_;
  std::vector<std::string> labels_;
};

enum class SizePolicy {
  FirstDraw,       // item size = bytes of its first request; later requests carry that size
  MeanOfRequests,  // item size = mean bytes over its requests
  Unit,            // every item has size 1
};

std::string_view to_string(SizePolicy policy) noexcept;
std::optional<SizePolicy> parse_size_policy(std::string_view text) noexcept;

class ItemCatalog {
 public:
  // Inserts or replaces.
  void put(ContentItem item);
  const ContentItem* find(std::string_view item_id) const;
  std::size_t size() const { return items_.size(); }
  const std::map<std::string, ContentItem, std::less<>>& items() const { return items_; }

 private:
  std::map<std::string, ContentItem, std::less<>> items_;
};

using ItemSizes = std::unordered_map<std::string, std::uint64_t>;

// Size of every item referenced by `requests`: 1 under SizePolicy::Unit,
// otherwise the catalog size when known and the mean request bytes (rounded,
// at least 1) for items the catalog lacks.
ItemSizes item_sizes(std::span<const Request> requests, const ItemCatalog& catalog,
                     SizePolicy policy);

struct Assignment {
  std::vector<Request> requests;
  ItemCatalog catalog;
};

// Per-category content ids:
//   RealTime, Players, Other: a fresh id per request
//   YouTube, OnDemand: rank drawn from `video` (Zipf(zipf_exponent) over
//     video_catalog_size when null), separate namespaces per category
//   News, Sports: with popular_hit_prob one of popular_pool_size shared items,
//     else fresh
//   Weather, Maps: with local_hit_prob one of local_pool_size items of the
//     request's cell, else fresh
// Randomness is keyed by request index, so output does not depend on
// evaluation order.
Assignment assign_content_ids(std::vector<Request> requests, const DemandConfig& config,
                              SizePolicy policy = SizePolicy::MeanOfRequests,
                              const VideoCatalog* video = nullptr);

using CategoryPools = std::map<ContentCategory, std::vector<std::string>>;

// Top ceil(top_fraction * distinct items) items of each category by request
// count (ties by ascending id). RealTime and Players get no pool.
CategoryPools recommendation_pools(std::span<const Request> requests, double top_fraction);

std::string pools_to_json(const CategoryPools& pools);

struct Perturbation {
  std::vector<Request> requests;
  std::size_t eligible = 0;
  std::size_t switched = 0;  // requests whose coin fired, including same-item landings
};

// Each eligible request independently switches, with probability p, to a
// uniform draw from its category's pool. Pools come from the unperturbed
// stream. For a fixed seed the switched set grows monotonically with p.
Perturbation apply_recommendation(std::vector<Request> requests, double p, double top_fraction,
                                  std::uint64_t seed);
Perturbation apply_recommendation(std::vector<Request> requests, double p,
                                  const CategoryPools& pools, std::uint64_t seed);

// Id of the k-th location-specific item for (operator, cell, category).
std::string local_item_id(std::string_view operator_name, std::string_view cell_id,
                          ContentCategory category, std::size_t k);

// Each request independently switches, with probability q, to one of
// `items_per_cell` items specific to its cell (and category). When
// `known_cells` is given, requests from other cells are a ValidationError.
Perturbation apply_locality(std::vector<Request> requests, double q, std::size_t items_per_cell,
                            std::uint64_t seed, const std::set<CellKey>* known_cells = nullptr);

}  // namespace fogcache
