#include "fogcache/demand.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <json.hpp>

#include "fogcache/csv.hpp"
#include "fogcache/error.hpp"

namespace fogcache {

namespace {

void require_probability(double value, const char* field) {
  if (!(value >= 0.0 && value <= 1.0))
    throw ValidationError(std::string(field) + " must be a probability in [0, 1]");
}

void require_positive(std::size_t value, const char* field) {
  if (value < 1) throw ValidationError(std::string(field) + " must be at least 1");
}

std::string tag(ContentCategory category) {
  std::string out(to_string(category));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string cell_label(std::string_view operator_name, std::string_view cell_id) {
  std::string out(operator_name);
  out += ':';
  out += cell_id;
  return out;
}

std::string fresh_id(ContentCategory category, std::size_t index) {
  return tag(category) + "/n" + std::to_string(index);
}

}  // namespace

void validate(const DemandConfig& c) {
  if (!(c.zipf_exponent > 0.0) || !std::isfinite(c.zipf_exponent))
    throw ValidationError("zipf_exponent must be positive");
  require_positive(c.video_catalog_size, "video_catalog_size");
  require_positive(c.popular_pool_size, "popular_pool_size");
  require_probability(c.popular_hit_prob, "popular_hit_prob");
  require_positive(c.local_pool_size, "local_pool_size");
  require_probability(c.local_hit_prob, "local_hit_prob");
  require_probability(c.rec_top_fraction, "rec_top_fraction");
  require_probability(c.rec_prob, "rec_prob");
  require_positive(c.local_items_per_cell, "local_items_per_cell");
  require_probability(c.loc_prob, "loc_prob");
}

// ---------------------------------------------------------------------------
// Video catalog

VideoCatalog VideoCatalog::zipf(double exponent, std::size_t size) {
  if (!(exponent > 0.0)) throw ValidationError("zipf_exponent must be positive");
  require_positive(size, "video_catalog_size");
  VideoCatalog catalog;
  catalog.cdf_.resize(size);
  double total = 0.0;
  for (std::size_t k = 0; k < size; ++k) {
    total += std::pow(static_cast<double>(k + 1), -exponent);
    catalog.cdf_[k] = total;
  }
  for (auto& v : catalog.cdf_) v /= total;
  catalog.cdf_.back() = 1.0;
  return catalog;
}

VideoCatalog VideoCatalog::from_weights(std::vector<std::pair<std::string, double>> weights) {
  if (weights.empty()) throw ValidationError("video weight list is empty");
  VideoCatalog catalog;
  double total = 0.0;
  for (auto& [label, w] : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw ValidationError("video weight for '" + label + "' must be non-negative");
    total += w;
    catalog.cdf_.push_back(total);
    catalog.labels_.push_back(std::move(label));
  }
  if (!(total > 0.0)) throw ValidationError("video weights sum to zero");
  for (auto& v : catalog.cdf_) v /= total;
  catalog.cdf_.back() = 1.0;
  return catalog;
}

VideoCatalog VideoCatalog::load(const std::filesystem::path& path) {
  csv::Reader reader(path, /*skip_comments=*/true);
  std::vector<std::pair<std::string, double>> weights;
  while (auto fields = reader.next()) {
    if (fields->size() != 2)
      throw ValidationError(path.string() + ":" + std::to_string(reader.line_number()) +
                            ": expected item,weight");
    const auto w = csv::parse_double((*fields)[1]);
    if (!w) {
      if (weights.empty()) continue;  // header
      throw ValidationError(path.string() + ":" + std::to_string(reader.line_number()) +
                            ": bad weight");
    }
    weights.emplace_back(std::string(csv::trim((*fields)[0])), *w);
  }
  return from_weights(std::move(weights));
}

std::size_t VideoCatalog::sample(Rng& rng) const {
  const double u = rng.uniform01();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
}

double VideoCatalog::probability(std::size_t index) const {
  if (index >= cdf_.size()) return 0.0;
  return index == 0 ? cdf_[0] : cdf_[index] - cdf_[index - 1];
}

std::string VideoCatalog::label(std::size_t index) const {
  if (!labels_.empty()) return labels_.at(index);
  return "v" + std::to_string(index + 1);
}

// ---------------------------------------------------------------------------
// Sizes

std::string_view to_string(SizePolicy policy) noexcept {
  switch (policy) {
    case SizePolicy::FirstDraw: return "first_draw";
    case SizePolicy::MeanOfRequests: return "mean";
    case SizePolicy::Unit: return "unit";
  }
  return "mean";
}

std::optional<SizePolicy> parse_size_policy(std::string_view text) noexcept {
  if (text == "first_draw") return SizePolicy::FirstDraw;
  if (text == "mean") return SizePolicy::MeanOfRequests;
  if (text == "unit") return SizePolicy::Unit;
  return std::nullopt;
}

void ItemCatalog::put(ContentItem item) {
  auto key = item.item_id;
  items_.insert_or_assign(std::move(key), std::move(item));
}

const ContentItem* ItemCatalog::find(std::string_view item_id) const {
  const auto it = items_.find(item_id);
  return it == items_.end() ? nullptr : &it->second;
}

ItemSizes item_sizes(std::span<const Request> requests, const ItemCatalog& catalog,
                     SizePolicy policy) {
  ItemSizes sizes;
  if (policy == SizePolicy::Unit) {
    for (const auto& r : requests) sizes.emplace(r.item, 1);
    return sizes;
  }
  std::unordered_map<std::string, std::pair<double, std::uint64_t>> sums;
  for (const auto& r : requests) {
    if (sizes.contains(r.item)) continue;
    if (const auto* item = catalog.find(r.item)) {
      sizes.emplace(r.item, item->size_bytes);
      continue;
    }
    auto& s = sums[r.item];
    s.first += static_cast<double>(r.bytes);
    s.second += 1;
  }
  for (const auto& [id, s] : sums) {
    const auto mean = std::llround(s.first / static_cast<double>(s.second));
    sizes.emplace(id, static_cast<std::uint64_t>(std::max<long long>(1, mean)));
  }
  return sizes;
}

// ---------------------------------------------------------------------------
// Content id assignment

Assignment assign_content_ids(std::vector<Request> requests, const DemandConfig& config,
                              SizePolicy policy, const VideoCatalog* video) {
  validate(config);
  std::optional<VideoCatalog> own_catalog;
  if (!video) {
    own_catalog = VideoCatalog::zipf(config.zipf_exponent, config.video_catalog_size);
    video = &*own_catalog;
  }
  const auto seed = derive_seed(config.seed, "demand/assign");

  Assignment out;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    auto& r = requests[i];
    Rng rng = Rng::for_index(seed, i);
    std::optional<std::string> local_to;
    switch (r.category) {
      case ContentCategory::RealTime:
      case ContentCategory::Players:
      case ContentCategory::Other:
        r.item = fresh_id(r.category, i);
        break;
      case ContentCategory::YouTube:
      case ContentCategory::OnDemand:
        r.item = tag(r.category) + "/" + video->label(video->sample(rng));
        break;
      case ContentCategory::News:
      case ContentCategory::Sports:
        if (rng.bernoulli(config.popular_hit_prob)) {
          r.item = tag(r.category) + "/p" + std::to_string(rng.uniform_index(config.popular_pool_size));
        } else {
          r.item = fresh_id(r.category, i);
        }
        break;
      case ContentCategory::Weather:
      case ContentCategory::Maps:
        if (rng.bernoulli(config.local_hit_prob)) {
          const auto cell = cell_label(r.operator_name, r.cell_id);
          r.item = tag(r.category) + "/" + cell + "/l" +
                   std::to_string(rng.uniform_index(config.local_pool_size));
          local_to = cell;
        } else {
          r.item = fresh_id(r.category, i);
        }
        break;
    }

    if (const auto* known = out.catalog.find(r.item)) {
      if (policy == SizePolicy::FirstDraw) r.bytes = known->size_bytes;
    } else {
      const std::uint64_t size =
          policy == SizePolicy::Unit ? 1 : std::max<std::uint64_t>(1, r.bytes);
      out.catalog.put({r.item, r.category, size, local_to});
    }
  }

  if (policy == SizePolicy::MeanOfRequests) {
    ItemCatalog empty;
    const auto sizes = item_sizes(requests, empty, SizePolicy::MeanOfRequests);
    for (const auto& [id, item] : out.catalog.items()) {
      auto updated = item;
      updated.size_bytes = sizes.at(id);
      out.catalog.put(std::move(updated));
    }
  }
  out.requests = std::move(requests);
  return out;
}

// ---------------------------------------------------------------------------
// Recommendation bias

CategoryPools recommendation_pools(std::span<const Request> requests, double top_fraction) {
  require_probability(top_fraction, "rec_top_fraction");
  std::map<ContentCategory, std::unordered_map<std::string, std::uint64_t>> counts;
  for (const auto& r : requests) {
    if (!is_cacheable(r.category)) continue;
    ++counts[r.category][r.item];
  }
  CategoryPools pools;
  for (auto& [category, per_item] : counts) {
    std::vector<std::pair<std::string, std::uint64_t>> ranked(per_item.begin(), per_item.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    // Guard against 0.05 * 20 landing a hair above 1.
    const double raw = top_fraction * static_cast<double>(ranked.size());
    const auto take = std::min(ranked.size(), static_cast<std::size_t>(std::ceil(raw - 1e-9)));
    if (take == 0) continue;
    auto& pool = pools[category];
    for (std::size_t i = 0; i < take; ++i) pool.push_back(ranked[i].first);
  }
  return pools;
}

std::string pools_to_json(const CategoryPools& pools) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [category, items] : pools) doc[std::string(to_string(category))] = items;
  return doc.dump(1);
}

Perturbation apply_recommendation(std::vector<Request> requests, double p, double top_fraction,
                                  std::uint64_t seed) {
  require_probability(p, "rec_prob");
  const auto pools = recommendation_pools(requests, top_fraction);
  return apply_recommendation(std::move(requests), p, pools, seed);
}

Perturbation apply_recommendation(std::vector<Request> requests, double p,
                                  const CategoryPools& pools, std::uint64_t seed) {
  require_probability(p, "rec_prob");
  Perturbation out;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    auto& r = requests[i];
    if (!is_cacheable(r.category)) continue;
    const auto it = pools.find(r.category);
    if (it == pools.end() || it->second.empty()) continue;
    ++out.eligible;
    Rng rng = Rng::for_index(seed, i);
    if (rng.uniform01() < p) {
      r.item = it->second[rng.uniform_index(it->second.size())];
      ++out.switched;
    }
  }
  out.requests = std::move(requests);
  return out;
}

// ---------------------------------------------------------------------------
// Locality bias

std::string local_item_id(std::string_view operator_name, std::string_view cell_id,
                          ContentCategory category, std::size_t k) {
  return tag(category) + "/" + cell_label(operator_name, cell_id) + "/q" + std::to_string(k);
}

Perturbation apply_locality(std::vector<Request> requests, double q, std::size_t items_per_cell,
                            std::uint64_t seed, const std::set<CellKey>* known_cells) {
  require_probability(q, "loc_prob");
  require_positive(items_per_cell, "local_items_per_cell");
  Perturbation out;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    auto& r = requests[i];
    if (known_cells && !known_cells->contains(CellKey{r.operator_name, r.cell_id}))
      throw ValidationError("request " + std::to_string(i) + " refers to unknown cell '" +
                            r.operator_name + "/" + r.cell_id + "'");
    ++out.eligible;
    Rng rng = Rng::for_index(seed, i);
    if (rng.uniform01() < q) {
      r.item = local_item_id(r.operator_name, r.cell_id, r.category,
                             rng.uniform_index(items_per_cell));
      ++out.switched;
    }
  }
  out.requests = std::move(requests);
  return out;
}

}  // namespace fogcache
