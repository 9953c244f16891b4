#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "fixtures.hpp"
#include "fogcache/demand.hpp"
#include "fogcache/error.hpp"
#include "fogcache/synth.hpp"

using namespace fogcache;

namespace {

Request raw(ContentCategory category, std::string cell = "c1", std::string user = "u1",
            std::uint64_t bytes = 100) {
  Request r;
  r.user_id = std::move(user);
  r.day = "2015-10-01";
  r.cell_id = std::move(cell);
  r.operator_name = "op";
  r.category = category;
  r.bytes = bytes;
  return r;
}

DemandConfig small_config(std::uint64_t seed = 3) {
  DemandConfig c;
  c.seed = seed;
  c.video_catalog_size = 5'000;
  return c;
}

// Requests spread over categories and cells with ids from assign_content_ids.
std::vector<Request> mixed_stream(std::size_t n, std::uint64_t seed) {
  std::vector<Request> requests;
  const std::array cats = {ContentCategory::YouTube, ContentCategory::OnDemand,
                           ContentCategory::News,    ContentCategory::Sports,
                           ContentCategory::Weather, ContentCategory::Maps,
                           ContentCategory::RealTime, ContentCategory::Players};
  for (std::size_t i = 0; i < n; ++i)
    requests.push_back(raw(cats[i % cats.size()], "c" + std::to_string(i % 17),
                           "u" + std::to_string(i % 31), 100 + i % 13));
  return assign_content_ids(std::move(requests), small_config(seed)).requests;
}

bool same_except_item(const Request& a, const Request& b) {
  return a.user_id == b.user_id && a.day == b.day && a.hour == b.hour && a.cell_id == b.cell_id &&
         a.operator_name == b.operator_name && a.category == b.category && a.bytes == b.bytes;
}

}  // namespace

TEST_CASE("config validation names the field") {
  DemandConfig c;
  c.popular_hit_prob = 1.5;
  CHECK_THROWS_WITH_AS(validate(c), doctest::Contains("popular_hit_prob"), ValidationError);
  c = {};
  c.local_pool_size = 0;
  CHECK_THROWS_WITH_AS(validate(c), doctest::Contains("local_pool_size"), ValidationError);
}

TEST_CASE("real-time and player requests always get distinct ids") {
  auto out = assign_content_ids({raw(ContentCategory::RealTime), raw(ContentCategory::RealTime)},
                                small_config());
  CHECK(out.requests[0].item != out.requests[1].item);

  const auto stream = mixed_stream(4000, 9);
  std::map<std::string, int> uses;
  for (const auto& r : stream)
    if (!is_cacheable(r.category)) ++uses[r.item];
  CHECK(uses.size() == 1000);
  for (const auto& [item, n] : uses) CHECK(n == 1);
}

TEST_CASE("news drawn from the popular pool when the branch is forced") {
  auto config = small_config();
  config.popular_hit_prob = 1.0;
  std::vector<Request> requests(500, raw(ContentCategory::News));
  const auto out = assign_content_ids(std::move(requests), config);
  std::set<std::string> ids;
  for (const auto& r : out.requests) ids.insert(r.item);
  CHECK(ids.size() <= 50);
  CHECK(ids.size() >= 45);  // 500 uniform draws over 50 items miss few
  for (const auto& id : ids) CHECK(id.starts_with("news/p"));

  config.popular_hit_prob = 0.0;
  const auto fresh = assign_content_ids(std::vector<Request>(20, raw(ContentCategory::News)), config);
  std::set<std::string> fresh_ids;
  for (const auto& r : fresh.requests) fresh_ids.insert(r.item);
  CHECK(fresh_ids.size() == 20);
}

TEST_CASE("maps requests drawn from the cell's local pool when forced") {
  auto config = small_config();
  config.local_hit_prob = 1.0;
  std::vector<Request> requests;
  for (int i = 0; i < 300; ++i) requests.push_back(raw(ContentCategory::Maps, i % 2 ? "C" : "D"));
  const auto out = assign_content_ids(std::move(requests), config);
  std::set<std::string> in_c, in_d;
  for (const auto& r : out.requests) (r.cell_id == "C" ? in_c : in_d).insert(r.item);
  CHECK(in_c.size() == 10);
  CHECK(in_d.size() == 10);
  for (const auto& id : in_c) CHECK(in_d.count(id) == 0);
  for (const auto& [id, item] : out.catalog.items()) CHECK(item.local_to.has_value());
}

TEST_CASE("zipf catalog rank-frequency slope") {
  // Least-squares slope of log(frequency) on log(rank) over the top 100 ranks
  // estimates the exponent.
  const double exponent = 0.8;
  const auto catalog = VideoCatalog::zipf(exponent, 1'000'000);
  Rng rng(12345);
  std::vector<double> counts(100, 0.0);
  for (int i = 0; i < 1'000'000; ++i) {
    const auto k = catalog.sample(rng);
    if (k < counts.size()) counts[k] += 1.0;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    REQUIRE(counts[k] > 0.0);
    const double x = std::log(static_cast<double>(k + 1));
    const double y = std::log(counts[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(std::abs(-slope - exponent) <= 0.05 * exponent);

  // The probabilities themselves follow k^-s / H.
  CHECK(catalog.probability(0) / catalog.probability(9) == doctest::Approx(std::pow(10.0, exponent)));
  CHECK(catalog.label(0) == "v1");
}

TEST_CASE("empirical video weights") {
  const auto catalog = VideoCatalog::from_weights({{"cats", 3.0}, {"dogs", 1.0}});
  CHECK(catalog.size() == 2);
  CHECK(catalog.probability(0) == doctest::Approx(0.75));
  CHECK(catalog.label(1) == "dogs");
  CHECK_THROWS_AS(VideoCatalog::from_weights({}), ValidationError);
}

TEST_CASE("size policies") {
  std::vector<Request> requests = {raw(ContentCategory::YouTube, "c1", "u1", 100),
                                   raw(ContentCategory::YouTube, "c1", "u2", 300)};
  DemandConfig config = small_config();
  config.video_catalog_size = 1;  // both requests hit the same video
  SUBCASE("first draw") {
    const auto out = assign_content_ids(requests, config, SizePolicy::FirstDraw);
    CHECK(out.requests[0].item == out.requests[1].item);
    CHECK(out.catalog.find(out.requests[0].item)->size_bytes == 100);
    CHECK(out.requests[1].bytes == 100);
  }
  SUBCASE("mean of requests") {
    const auto out = assign_content_ids(requests, config, SizePolicy::MeanOfRequests);
    CHECK(out.catalog.find(out.requests[0].item)->size_bytes == 200);
    CHECK(out.requests[1].bytes == 300);
  }
  SUBCASE("unit") {
    const auto out = assign_content_ids(requests, config, SizePolicy::Unit);
    const auto sizes = item_sizes(out.requests, out.catalog, SizePolicy::Unit);
    CHECK(sizes.at(out.requests[0].item) == 1);
  }
}

TEST_CASE("recommendation pools take the top fraction per category") {
  std::vector<Request> requests;
  auto add = [&](ContentCategory c, const std::string& item, int n) {
    for (int i = 0; i < n; ++i) {
      auto r = raw(c);
      r.item = item;
      requests.push_back(r);
    }
  };
  // 20 distinct YouTube items: 5% of 20 is exactly one item.
  for (int k = 0; k < 20; ++k) add(ContentCategory::YouTube, "y" + std::to_string(k), k == 7 ? 9 : 1);
  add(ContentCategory::News, "n1", 2);
  add(ContentCategory::News, "n2", 2);
  add(ContentCategory::RealTime, "rt", 5);
  const auto pools = recommendation_pools(requests, 0.05);
  CHECK(pools.at(ContentCategory::YouTube) == std::vector<std::string>{"y7"});
  CHECK(pools.at(ContentCategory::News) == std::vector<std::string>{"n1"});  // tie: lower id
  CHECK(pools.count(ContentCategory::RealTime) == 0);
}

TEST_CASE("apply_recommendation") {
  const auto input = mixed_stream(12'000, 4);
  const auto pools = recommendation_pools(input, 0.05);

  SUBCASE("p = 0 is the identity") {
    CHECK(apply_recommendation(input, 0.0, pools, 1).requests == input);
  }
  SUBCASE("p = 1 puts every eligible request in its pool") {
    const auto out = apply_recommendation(input, 1.0, pools, 1);
    for (std::size_t i = 0; i < input.size(); ++i) {
      const auto& r = out.requests[i];
      if (!is_cacheable(r.category)) {
        CHECK(r.item == input[i].item);
        continue;
      }
      const auto& pool = pools.at(r.category);
      CHECK(std::find(pool.begin(), pool.end(), r.item) != pool.end());
    }
  }
  SUBCASE("p = 0.5 switches about half") {
    const auto out = apply_recommendation(input, 0.5, pools, 77);
    REQUIRE(out.eligible >= 9000);
    const double frac = static_cast<double>(out.switched) / static_cast<double>(out.eligible);
    CHECK(std::abs(frac - 0.5) <= 0.02);
  }
  SUBCASE("preserves everything but the item and is deterministic") {
    const auto a = apply_recommendation(input, 0.3, pools, 5);
    const auto b = apply_recommendation(input, 0.3, pools, 5);
    CHECK(a.requests == b.requests);
    REQUIRE(a.requests.size() == input.size());
    for (std::size_t i = 0; i < input.size(); ++i) CHECK(same_except_item(a.requests[i], input[i]));
  }
  SUBCASE("switched set grows with p for a fixed seed") {
    const auto lo = apply_recommendation(input, 0.2, pools, 5).requests;
    const auto hi = apply_recommendation(input, 0.6, pools, 5).requests;
    for (std::size_t i = 0; i < input.size(); ++i)
      if (lo[i].item != input[i].item) CHECK(hi[i].item == lo[i].item);
  }
}

TEST_CASE("apply_locality") {
  const auto input = mixed_stream(10'000, 6);

  SUBCASE("q = 0 is the identity") { CHECK(apply_locality(input, 0.0, 5, 1).requests == input); }
  SUBCASE("q = 1 makes cells disjoint") {
    const auto out = apply_locality(input, 1.0, 5, 1).requests;
    std::map<std::string, std::set<std::string>> by_cell;
    for (const auto& r : out) by_cell[r.cell_id].insert(r.item);
    std::map<std::string, int> owners;
    for (const auto& [cell, items] : by_cell)
      for (const auto& item : items) ++owners[item];
    for (const auto& [item, n] : owners) CHECK(n == 1);
    for (const auto& r : out) CHECK(r.item.find("/op:" + r.cell_id + "/q") != std::string::npos);
  }
  SUBCASE("q = 0.5 switches about half") {
    const auto out = apply_locality(input, 0.5, 5, 21);
    CHECK(out.eligible == input.size());
    const double frac = static_cast<double>(out.switched) / static_cast<double>(out.eligible);
    CHECK(std::abs(frac - 0.5) <= 0.02);
  }
  SUBCASE("preserves everything but the item") {
    const auto out = apply_locality(input, 0.4, 5, 2).requests;
    for (std::size_t i = 0; i < input.size(); ++i) CHECK(same_except_item(out[i], input[i]));
    CHECK(out == apply_locality(input, 0.4, 5, 2).requests);
  }
  SUBCASE("unknown cells are rejected") {
    const std::set<CellKey> known = {{"op", "c1"}};
    CHECK_THROWS_AS(apply_locality(input, 0.5, 5, 1, &known), ValidationError);
  }
  CHECK_THROWS_AS(apply_locality(input, 0.5, 0, 1), ValidationError);
  CHECK_THROWS_AS(apply_locality(input, 1.5, 5, 1), ValidationError);
}

TEST_CASE("assignment is a pure function of input and seed") {
  CHECK(mixed_stream(3000, 8) == mixed_stream(3000, 8));
  CHECK_FALSE(mixed_stream(3000, 8) == mixed_stream(3000, 9));
}

TEST_CASE("synthetic scenario generation") {
  SyntheticOptions o;
  o.n_cells = 60;
  o.n_users = 50;
  o.hours = 2;
  DemandConfig c = small_config(5);

  SUBCASE("deterministic") {
    const auto a = generate_synthetic_scenario(o, c);
    const auto b = generate_synthetic_scenario(o, c);
    CHECK(a.requests == b.requests);
    CHECK(a.cells.size() == 60);
    CHECK_FALSE(a.requests.empty());
  }
  SUBCASE("requests reference known cells and positive bytes") {
    const auto a = generate_synthetic_scenario(o, c);
    std::set<std::string> cells;
    for (const auto& cell : a.cells) cells.insert(cell.cell_id);
    for (const auto& r : a.requests) {
      CHECK(cells.count(r.cell_id) == 1);
      CHECK(r.bytes > 0);
      CHECK_FALSE(r.item.empty());
      CHECK(a.catalog.find(r.item)->category == r.category);
    }
  }
  SUBCASE("invalid sizes are rejected") {
    o.n_users = 0;
    CHECK_THROWS_AS(generate_synthetic_scenario(o, c), ValidationError);
    o.n_users = 10;
    o.category_shares[ContentCategory::YouTube] += 0.5;
    CHECK_THROWS_AS(generate_synthetic_scenario(o, c), ValidationError);
  }
  SUBCASE("3882 cells give the large-operator tree") {
    o.n_cells = 3882;
    o.n_users = 5;
    o.hours = 1;
    const auto a = generate_synthetic_scenario(o, c);
    CHECK(build_tree(a.cells, {10}).level_counts() == std::array<std::size_t, 4>{3882, 389, 39, 4});
  }
  SUBCASE("dense deployments have smaller cells") {
    o.n_cells = 200;
    auto dense = o;
    dense.style = DeploymentStyle::DenseSmall;
    const auto a = generate_synthetic_scenario(o, c);
    const auto b = generate_synthetic_scenario(dense, c);
    auto mean_area = [](const SyntheticScenario& s) {
      double sum = 0;
      for (const auto& cell : s.cells) sum += cell.area_km2;
      return sum / static_cast<double>(s.cells.size());
    };
    CHECK(mean_area(b) < mean_area(a));
  }
}

TEST_CASE("calendar arithmetic") {
  CHECK(add_days("2015-10-01", 0) == "2015-10-01");
  CHECK(add_days("2015-12-31", 1) == "2016-01-01");
  CHECK(add_days("2016-02-28", 1) == "2016-02-29");
  CHECK(add_days("2015-02-28", 1) == "2015-03-01");
  CHECK_THROWS_AS(add_days("yesterday", 1), ValidationError);
}
