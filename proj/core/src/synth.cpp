#include "fogcache/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "fogcache/csv.hpp"
#include "fogcache/error.hpp"
#include "fogcache/rng.hpp"

namespace fogcache {

namespace {

constexpr double kKmPerDegree = kEarthRadiusKm * std::numbers::pi / 180.0;

// Days since 1970-01-01 for a proleptic Gregorian date (H. Hinnant).
long days_from_civil(long y, unsigned m, unsigned d) {
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

void civil_from_days(long z, long& y, unsigned& m, unsigned& d) {
  z += 719468;
  const long era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<long>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

// Planar view of the bounding box in km, for nearest-site queries.
struct Plane {
  BoundingBox box;
  double kx;

  explicit Plane(const BoundingBox& b)
      : box(b),
        kx(kKmPerDegree * std::cos((b.lat_min + b.lat_max) / 2.0 * std::numbers::pi / 180.0)) {}

  double x(const LatLon& p) const { return (p.lon - box.lon_min) * kx; }
  double y(const LatLon& p) const { return (p.lat - box.lat_min) * kKmPerDegree; }
  double width() const { return (box.lon_max - box.lon_min) * kx; }
  double height() const { return (box.lat_max - box.lat_min) * kKmPerDegree; }
};

// Uniform bucket grid over the sites; nearest queries scan rings of buckets.
class NearestSite {
 public:
  NearestSite(const Plane& plane, std::span<const LatLon> sites) : plane_(plane), sites_(sites) {
    const double area = std::max(plane.width() * plane.height(), 1e-9);
    bucket_km_ = std::max(std::sqrt(area / static_cast<double>(sites.size())), 1e-6);
    nx_ = std::max<long>(1, static_cast<long>(std::ceil(plane.width() / bucket_km_)));
    ny_ = std::max<long>(1, static_cast<long>(std::ceil(plane.height() / bucket_km_)));
    buckets_.resize(static_cast<std::size_t>(nx_ * ny_));
    for (std::size_t i = 0; i < sites.size(); ++i) buckets_[bucket(sites[i])].push_back(i);
  }

  std::size_t nearest(const LatLon& p) const {
    const double px = plane_.x(p);
    const double py = plane_.y(p);
    const long bx = clamp_x(static_cast<long>(std::floor(px / bucket_km_)));
    const long by = clamp_y(static_cast<long>(std::floor(py / bucket_km_)));
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    const long max_ring = std::max(nx_, ny_);
    for (long r = 0; r <= max_ring; ++r) {
      for (long ix = bx - r; ix <= bx + r; ++ix) {
        for (long iy = by - r; iy <= by + r; ++iy) {
          if (std::max(std::abs(ix - bx), std::abs(iy - by)) != r) continue;
          if (ix < 0 || iy < 0 || ix >= nx_ || iy >= ny_) continue;
          for (std::size_t s : buckets_[static_cast<std::size_t>(iy * nx_ + ix)]) {
            const double dx = plane_.x(sites_[s]) - px;
            const double dy = plane_.y(sites_[s]) - py;
            const double d = dx * dx + dy * dy;
            if (d < best || (d == best && s < best_idx)) {
              best = d;
              best_idx = s;
            }
          }
        }
      }
      const double reach = static_cast<double>(r) * bucket_km_;
      if (best <= reach * reach) break;
    }
    return best_idx;
  }

 private:
  long clamp_x(long v) const { return std::clamp(v, 0L, nx_ - 1); }
  long clamp_y(long v) const { return std::clamp(v, 0L, ny_ - 1); }
  std::size_t bucket(const LatLon& p) const {
    const long ix = clamp_x(static_cast<long>(std::floor(plane_.x(p) / bucket_km_)));
    const long iy = clamp_y(static_cast<long>(std::floor(plane_.y(p) / bucket_km_)));
    return static_cast<std::size_t>(iy * nx_ + ix);
  }

  const Plane& plane_;
  std::span<const LatLon> sites_;
  double bucket_km_ = 1.0;
  long nx_ = 1;
  long ny_ = 1;
  std::vector<std::vector<std::size_t>> buckets_;
};

LatLon uniform_point(Rng& rng, const BoundingBox& b) {
  return {rng.uniform(b.lat_min, b.lat_max), rng.uniform(b.lon_min, b.lon_max)};
}

std::vector<LatLon> place_sites(const SyntheticOptions& o, Rng& rng) {
  const auto& b = o.bbox;
  std::vector<LatLon> sites;
  sites.reserve(o.n_cells);
  if (o.style == DeploymentStyle::SparseLarge) {
    for (std::size_t i = 0; i < o.n_cells; ++i) sites.push_back(uniform_point(rng, b));
    return sites;
  }
  // Dense deployments concentrate small cells around a few hot spots.
  constexpr int kHotspots = 8;
  constexpr double kClusteredShare = 0.7;
  const BoundingBox inner{b.lat_min + 0.1 * (b.lat_max - b.lat_min),
                          b.lat_max - 0.1 * (b.lat_max - b.lat_min),
                          b.lon_min + 0.1 * (b.lon_max - b.lon_min),
                          b.lon_max - 0.1 * (b.lon_max - b.lon_min)};
  std::vector<LatLon> hotspots;
  for (int i = 0; i < kHotspots; ++i) hotspots.push_back(uniform_point(rng, inner));
  const double sd_lat = 0.08 * (b.lat_max - b.lat_min);
  const double sd_lon = 0.08 * (b.lon_max - b.lon_min);
  for (std::size_t i = 0; i < o.n_cells; ++i) {
    if (rng.bernoulli(kClusteredShare)) {
      const auto& h = hotspots[rng.uniform_index(kHotspots)];
      sites.push_back({std::clamp(h.lat + sd_lat * rng.normal(), b.lat_min, b.lat_max),
                       std::clamp(h.lon + sd_lon * rng.normal(), b.lon_min, b.lon_max)});
    } else {
      sites.push_back(uniform_point(rng, b));
    }
  }
  return sites;
}

// Six observations on a circle of `radius_km` around the site.
std::vector<LatLon> hexagon(const LatLon& c, double radius_km) {
  std::vector<LatLon> pts;
  const double dlat = radius_km / kKmPerDegree;
  const double dlon = dlat / std::cos(c.lat * std::numbers::pi / 180.0);
  for (int k = 0; k < 6; ++k) {
    const double a = std::numbers::pi / 3.0 * k;
    pts.push_back({c.lat + dlat * std::sin(a), c.lon + dlon * std::cos(a)});
  }
  return pts;
}

std::size_t poisson(Rng& rng, double mean) {
  const double limit = std::exp(-mean);
  double prod = rng.uniform01();
  std::size_t k = 0;
  while (prod > limit) {
    ++k;
    prod *= rng.uniform01();
  }
  return k;
}

ContentCategory draw_category(Rng& rng, const CategoryShares& shares) {
  const double u = rng.uniform01();
  double acc = 0.0;
  ContentCategory last = ContentCategory::Other;
  for (auto c : kAllCategories) {
    const auto it = shares.find(c);
    if (it == shares.end() || it->second <= 0.0) continue;
    acc += it->second;
    last = c;
    if (u < acc) return c;
  }
  return last;
}

struct RawOperator {
  std::vector<CellEstimate> cells;
  std::vector<Request> requests;
};

RawOperator generate_raw(const SyntheticOptions& o, std::uint64_t seed) {
  Rng site_rng(derive_seed(seed, "synth/sites/" + o.operator_name));
  const auto sites = place_sites(o, site_rng);
  const Plane plane(o.bbox);
  const NearestSite index(plane, sites);

  RawOperator raw;
  const double radius = (o.style == DeploymentStyle::DenseSmall ? 0.5 : 1.0) *
                        std::sqrt(plane.width() * plane.height() /
                                  (std::numbers::pi * static_cast<double>(o.n_cells)));
  std::vector<std::string> cell_ids;
  char buf[32];
  for (std::size_t i = 0; i < sites.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "-c%06zu", i);
    cell_ids.push_back(o.operator_name + buf);
    raw.cells.push_back(estimate_cell(o.operator_name, cell_ids.back(), hexagon(sites[i], radius)));
  }

  const auto steps = static_cast<std::size_t>(60 / o.sample_minutes);
  struct Tagged {
    std::size_t hour_index;
    Request request;
  };
  std::vector<Tagged> tagged;
  for (std::size_t u = 0; u < o.n_users; ++u) {
    std::snprintf(buf, sizeof(buf), "-u%06zu", u);
    const std::string user = o.operator_name + buf;
    Rng rng(derive_seed(seed, "synth/user/" + user));
    LatLon pos = uniform_point(rng, o.bbox);
    LatLon waypoint = uniform_point(rng, o.bbox);
    double speed = rng.uniform(o.speed_kmh_min, o.speed_kmh_max);

    for (std::size_t h = 0; h < o.hours; ++h) {
      std::vector<LatLon> samples{pos};
      const double step_km = speed * o.sample_minutes / 60.0;
      for (std::size_t s = 0; s < steps; ++s) {
        double left = step_km;
        while (left > 0.0) {
          const double d = great_circle_distance(pos, waypoint);
          if (d <= left) {
            pos = waypoint;
            left -= d;
            waypoint = uniform_point(rng, o.bbox);
            speed = rng.uniform(o.speed_kmh_min, o.speed_kmh_max);
            if (d == 0.0) break;
          } else {
            const double f = left / d;
            pos = {pos.lat + f * (waypoint.lat - pos.lat), pos.lon + f * (waypoint.lon - pos.lon)};
            left = 0.0;
          }
        }
        samples.push_back(pos);
      }

      const auto n = poisson(rng, o.requests_per_user_hour);
      for (std::size_t k = 0; k < n; ++k) {
        const auto& at = samples[rng.uniform_index(samples.size())];
        Request r;
        r.user_id = user;
        r.day = add_days(o.start_day, static_cast<long>(h / 24));
        r.hour = static_cast<int>(h % 24);
        r.operator_name = o.operator_name;
        r.cell_id = cell_ids[index.nearest(at)];
        r.category = draw_category(rng, o.category_shares);
        const auto model = o.size_model.at(r.category);
        r.bytes = static_cast<std::uint64_t>(
            std::max(1.0, std::round(rng.lognormal(std::log(model.median_bytes), model.sigma))));
        tagged.push_back({h, std::move(r)});
      }
    }
  }
  std::stable_sort(tagged.begin(), tagged.end(),
                   [](const Tagged& a, const Tagged& b) { return a.hour_index < b.hour_index; });
  raw.requests.reserve(tagged.size());
  for (auto& t : tagged) raw.requests.push_back(std::move(t.request));
  return raw;
}

}  // namespace

std::string_view to_string(DeploymentStyle style) noexcept {
  return style == DeploymentStyle::DenseSmall ? "dense_small" : "sparse_large";
}

std::optional<DeploymentStyle> parse_deployment_style(std::string_view text) noexcept {
  if (text == "dense_small") return DeploymentStyle::DenseSmall;
  if (text == "sparse_large") return DeploymentStyle::SparseLarge;
  return std::nullopt;
}

CategoryShares default_category_shares() {
  using C = ContentCategory;
  return {{C::YouTube, 0.40}, {C::OnDemand, 0.25}, {C::RealTime, 0.15}, {C::Players, 0.05},
          {C::News, 0.05},    {C::Sports, 0.04},   {C::Weather, 0.03},  {C::Maps, 0.03}};
}

std::map<ContentCategory, SizeDistribution> default_size_model() {
  using C = ContentCategory;
  return {{C::YouTube, {8e6, 1.0}},  {C::OnDemand, {2e7, 1.0}}, {C::RealTime, {1e7, 1.0}},
          {C::Players, {5e6, 1.0}},  {C::Weather, {2e5, 0.5}},  {C::Maps, {1e6, 0.7}},
          {C::News, {1.5e6, 0.7}},   {C::Sports, {3e6, 0.7}},   {C::Other, {5e5, 1.0}}};
}

void validate(const SyntheticOptions& o) {
  if (o.operator_name.empty() || o.operator_name.find_first_of(",/:\"") != std::string::npos)
    throw ValidationError("operator name must be non-empty without , / : or quotes");
  if (o.n_cells < 1) throw ValidationError("n_cells must be at least 1");
  if (o.n_users < 1) throw ValidationError("n_users must be at least 1");
  if (o.hours < 1) throw ValidationError("hours must be at least 1");
  double total = 0.0;
  for (const auto& [category, share] : o.category_shares) {
    if (!(share >= 0.0)) throw ValidationError("category_shares must be non-negative");
    total += share;
  }
  if (std::abs(total - 1.0) > 1e-6) throw ValidationError("category_shares must sum to 1");
  for (const auto& [category, share] : o.category_shares) {
    if (share <= 0.0) continue;
    const auto it = o.size_model.find(category);
    if (it == o.size_model.end() || !(it->second.median_bytes >= 1.0) || !(it->second.sigma >= 0.0))
      throw ValidationError("size_model lacks a valid entry for " + std::string(to_string(category)));
  }
  const auto& b = o.bbox;
  if (!(b.lat_min < b.lat_max) || !(b.lon_min < b.lon_max) || !is_valid({b.lat_min, b.lon_min}) ||
      !is_valid({b.lat_max, b.lon_max}))
    throw ValidationError("bbox must be a valid non-empty box");
  if (!(o.requests_per_user_hour > 0.0) || o.requests_per_user_hour > 500.0)
    throw ValidationError("requests_per_user_hour must be in (0, 500]");
  if (!(o.speed_kmh_min > 0.0) || !(o.speed_kmh_min <= o.speed_kmh_max))
    throw ValidationError("speed_kmh_min must be positive and at most speed_kmh_max");
  if (o.sample_minutes < 1 || o.sample_minutes > 60)
    throw ValidationError("sample_minutes must be in [1, 60]");
  add_days(o.start_day, 0);
}

std::string add_days(std::string_view iso_date, long days) {
  const auto bad = [&] { return ValidationError("bad date '" + std::string(iso_date) + "'"); };
  if (iso_date.size() != 10 || iso_date[4] != '-' || iso_date[7] != '-') throw bad();
  const auto y = csv::parse_int(iso_date.substr(0, 4));
  const auto m = csv::parse_int(iso_date.substr(5, 2));
  const auto d = csv::parse_int(iso_date.substr(8, 2));
  if (!y || !m || !d || *m < 1 || *m > 12 || *d < 1 || *d > 31) throw bad();
  long yy = 0;
  unsigned mm = 0, dd = 0;
  civil_from_days(days_from_civil(static_cast<long>(*y), static_cast<unsigned>(*m),
                                  static_cast<unsigned>(*d)) + days,
                  yy, mm, dd);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04ld-%02u-%02u", yy, mm, dd);
  return buf;
}

SyntheticScenario generate_synthetic_network(std::span<const SyntheticOptions> operators,
                                             const DemandConfig& config) {
  if (operators.empty()) throw ValidationError("at least one operator is required");
  validate(config);
  std::vector<Request> raw_requests;
  SyntheticScenario out;
  SizePolicy policy = operators.front().size_policy;
  std::vector<std::string> seen;
  for (const auto& o : operators) {
    validate(o);
    if (std::find(seen.begin(), seen.end(), o.operator_name) != seen.end())
      throw ValidationError("duplicate operator '" + o.operator_name + "'");
    seen.push_back(o.operator_name);
    if (o.size_policy != policy) throw ValidationError("operators must share one size_policy");
    auto raw = generate_raw(o, config.seed);
    out.cells.insert(out.cells.end(), std::make_move_iterator(raw.cells.begin()),
                     std::make_move_iterator(raw.cells.end()));
    raw_requests.insert(raw_requests.end(), std::make_move_iterator(raw.requests.begin()),
                        std::make_move_iterator(raw.requests.end()));
  }
  auto assigned = assign_content_ids(std::move(raw_requests), config, policy);
  out.requests = std::move(assigned.requests);
  out.catalog = std::move(assigned.catalog);
  return out;
}

SyntheticScenario generate_synthetic_scenario(const SyntheticOptions& options,
                                              const DemandConfig& config) {
  return generate_synthetic_network(std::span<const SyntheticOptions>(&options, 1), config);
}

}  // namespace fogcache
