#include <doctest.h>

#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "fogcache/error.hpp"
#include "fogcache/metrics.hpp"

using namespace fogcache;

namespace {

CachePlan plan_with_total(Architecture arch, std::uint64_t total) {
  CachePlan p;
  p.architecture = arch;
  p.total_size = total;
  return p;
}

}  // namespace

TEST_CASE("price-of-fog ratios") {
  const auto core = plan_with_total(Level::Core, 3);
  CHECK(*price_of_fog(plan_with_total(Level::Pod, 5), core).value == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  CHECK(std::abs(*price_of_fog(plan_with_total(Level::Pod, 5), core).value - 1.667) < 1e-3);
  CHECK(*price_of_fog(plan_with_total(Level::BaseStation, 6), core).value == 2.0);
  CHECK(*price_of_fog(core, core).value == 1.0);

  const auto pof = price_of_fog(plan_with_total(Level::Ring, 6), core);
  CHECK(pof.total_size_arch == 6);
  CHECK(pof.total_size_core == 3);

  CHECK_FALSE(price_of_fog(plan_with_total(Level::Ring, 0), plan_with_total(Level::Core, 0)).value);
  CHECK_THROWS_AS(price_of_fog(core, plan_with_total(Level::Pod, 3)), ValidationError);
}

TEST_CASE("worked example price-of-fog") {
  const auto w = test::worked_example();
  const auto core = test::plan_for(w, Level::Core);
  CHECK(*price_of_fog(test::plan_for(w, Level::Pod), core).value == doctest::Approx(5.0 / 3.0));
  CHECK(*price_of_fog(test::plan_for(w, Level::BaseStation), core).value == 2.0);
  CHECK(*price_of_fog(test::plan_for(w, Level::Ring), core).value == 2.0);
}

TEST_CASE("mean hit distance") {
  SUBCASE("base-station plans are at zero distance") {
    const auto w = test::worked_example();
    const auto d = mean_hit_distance(test::plan_for(w, Level::BaseStation), w.requests, w.topology);
    CHECK(d.mean_hit_distance_km == std::optional<double>(0.0));
    CHECK(d.hits == w.requests.size());
  }
  SUBCASE("two stations around a ring centroid") {
    const auto topo = test::tree_from_groups("op", {{0.0, 0.0}, {0.0, 0.02}}, {{0, 1}}, {{0}}, {{0}});
    const test::WorkedExample w{topo, test::one_request_per_pair("op", {{"bs1", "A"}, {"bs2", "B"}})};
    const auto d = mean_hit_distance(test::plan_for(w, Level::Ring), w.requests, w.topology);
    const double hundredth = 0.01 * std::numbers::pi / 180.0 * 6371.0;
    REQUIRE(d.mean_hit_distance_km.has_value());
    CHECK(*d.mean_hit_distance_km == doctest::Approx(hundredth));
    CHECK(std::abs(*d.mean_hit_distance_km - 1.112) < 1e-3);
    CHECK(d.mean_hops == 1.0);
  }
  SUBCASE("single-cell topology has coincident nodes") {
    const auto topo = test::tree_from_groups("op", {{34.0, -118.0}}, {{0}}, {{0}}, {{0}});
    const test::WorkedExample w{topo, test::one_request_per_pair("op", {{"bs1", "A"}})};
    for (auto arch : kLevels)
      CHECK(*mean_hit_distance(test::plan_for(w, arch), w.requests, w.topology).mean_hit_distance_km == 0.0);
  }
  SUBCASE("no hits leaves the mean undefined") {
    const auto w = test::worked_example();
    const auto d = mean_hit_distance(test::plan_for(w, Level::Core, 0.0), w.requests, w.topology);
    CHECK(d.zero_hits());
    CHECK_FALSE(d.mean_hit_distance_km.has_value());
  }
  SUBCASE("request weighting counts every hit") {
    const auto topo = test::tree_from_groups("op", {{0.0, 0.0}, {0.0, 0.04}}, {{0, 1}}, {{0}}, {{0}});
    // Three hits at bs1 and one at bs2, all 0.02 degrees from the ring.
    const test::WorkedExample w{topo, test::one_request_per_pair(
                                          "op", {{"bs1", "A"}, {"bs1", "A"}, {"bs1", "A"}, {"bs2", "B"}})};
    const auto d = mean_hit_distance(test::plan_for(w, Level::Ring), w.requests, w.topology);
    CHECK(d.hits == 4);
    CHECK(*d.mean_hit_distance_km == doctest::Approx(2 * 0.01 * std::numbers::pi / 180.0 * 6371.0));
    CHECK(*d.mean_item_distance_km == doctest::Approx(*d.mean_hit_distance_km));
  }
}

TEST_CASE("price-of-fog bounds on random scenarios") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    test::SmallScenarioOptions o;
    o.seed = seed;
    o.cells = 5 + seed;
    o.fanout = 3;
    const auto s = test::small_scenario(o);
    const auto& topo = s.topologies.front();
    const auto worthy = mark_cache_worthy(tally_popularity(s.requests), 0.5);
    const auto core = place_caches(worthy, topo, Level::Core);
    for (auto arch : kLevels) {
      const auto pof = price_of_fog(place_caches(worthy, topo, arch), core);
      REQUIRE(pof.value.has_value());
      CHECK(*pof.value >= 1.0);
      CHECK(*pof.value <= static_cast<double>(topo.count(Level::BaseStation)));
    }
  }
}
