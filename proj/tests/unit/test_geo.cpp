#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "fogcache/geo.hpp"

using namespace fogcache;

TEST_CASE("great-circle distance closed forms") {
  const LatLon origin{0.0, 0.0};
  CHECK(great_circle_distance(origin, origin) == 0.0);

  // One degree of longitude on the equator: (pi / 180) * R.
  const double one_degree = std::numbers::pi / 180.0 * 6371.0;
  CHECK(great_circle_distance(origin, {0.0, 1.0}) == doctest::Approx(one_degree).epsilon(1e-12));
  CHECK(std::abs(great_circle_distance(origin, {0.0, 1.0}) - 111.19) < 0.01);

  // Antipodal along the equator: pi * R.
  CHECK(std::abs(great_circle_distance(origin, {0.0, 180.0}) - 20015.1) < 0.1);
  CHECK(great_circle_distance(origin, {0.0, 180.0}) ==
        doctest::Approx(std::numbers::pi * 6371.0).epsilon(1e-12));

  // Meridian arc pole to pole.
  CHECK(great_circle_distance({-90.0, 0.0}, {90.0, 0.0}) ==
        doctest::Approx(std::numbers::pi * 6371.0).epsilon(1e-12));
}

TEST_CASE("great-circle distance is a metric on random triples") {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> lat(-90.0, 90.0);
  std::uniform_real_distribution<double> lon(-180.0, 180.0);
  for (int i = 0; i < 5000; ++i) {
    const LatLon a{lat(gen), lon(gen)};
    const LatLon b{lat(gen), lon(gen)};
    const LatLon c{lat(gen), lon(gen)};
    const double ab = great_circle_distance(a, b);
    const double bc = great_circle_distance(b, c);
    const double ac = great_circle_distance(a, c);
    CHECK(ab >= 0.0);
    CHECK(ab == great_circle_distance(b, a));
    CHECK(ac <= ab + bc + 1e-9);
  }
}

TEST_CASE("path length is the sum of hops and ignores direction") {
  const std::vector<LatLon> path{{34.0, -118.0}, {34.01, -118.0}, {34.01, -118.02}, {34.05, -118.1}};
  double expected = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) expected += great_circle_distance(path[i - 1], path[i]);
  CHECK(path_length_km(path) == doctest::Approx(expected));
  std::vector<LatLon> reversed(path.rbegin(), path.rend());
  CHECK(path_length_km(reversed) == doctest::Approx(path_length_km(path)).epsilon(1e-12));
  CHECK(path_length_km(std::span<const LatLon>{}) == 0.0);
}

TEST_CASE("convex hull of a square with interior and duplicate points") {
  const auto hull = convex_hull({{0, 0}, {0, 1}, {1, 0}, {1, 1}, {0.5, 0.5}, {0, 0}, {0.5, 0}});
  REQUIRE(hull.size() == 4);
  CHECK(signed_area_deg2(hull) == doctest::Approx(1.0));
  const auto c = polygon_centroid(hull);
  CHECK(c.lat == doctest::Approx(0.5));
  CHECK(c.lon == doctest::Approx(0.5));
}

TEST_CASE("triangle centroid is the vertex average") {
  // For a triangle the area centroid equals (sum of vertices) / 3.
  const auto hull = convex_hull({{0, 0}, {2, 0}, {0, 2}});
  const auto c = polygon_centroid(hull);
  CHECK(c.lat == doctest::Approx(2.0 / 3.0));
  CHECK(c.lon == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("centroid differs from vertex mean for an irregular quadrilateral") {
  // Decompose into two triangles and weight their centroids by area.
  const std::vector<LatLon> quad{{0, 0}, {0, 4}, {1, 4}, {3, 0}};
  const auto hull = convex_hull(quad);
  auto tri_area = [](LatLon a, LatLon b, LatLon c) {
    return std::abs((b.lon - a.lon) * (c.lat - a.lat) - (c.lon - a.lon) * (b.lat - a.lat)) / 2.0;
  };
  const double a1 = tri_area(quad[0], quad[1], quad[2]);
  const double a2 = tri_area(quad[0], quad[2], quad[3]);
  const double lat = (a1 * (quad[0].lat + quad[1].lat + quad[2].lat) / 3.0 +
                      a2 * (quad[0].lat + quad[2].lat + quad[3].lat) / 3.0) /
                     (a1 + a2);
  const double lon = (a1 * (quad[0].lon + quad[1].lon + quad[2].lon) / 3.0 +
                      a2 * (quad[0].lon + quad[2].lon + quad[3].lon) / 3.0) /
                     (a1 + a2);
  const auto c = polygon_centroid(hull);
  CHECK(c.lat == doctest::Approx(lat));
  CHECK(c.lon == doctest::Approx(lon));
  CHECK(std::abs(signed_area_deg2(hull)) == doctest::Approx(a1 + a2));
}

TEST_CASE("degenerate hulls") {
  SUBCASE("single point") {
    const auto hull = convex_hull({{34.05, -118.25}});
    REQUIRE(hull.size() == 1);
    CHECK(polygon_area_km2(hull) == 0.0);
    CHECK(polygon_centroid(hull) == LatLon{34.05, -118.25});
  }
  SUBCASE("collinear points keep the extremes") {
    const auto hull = convex_hull({{0, 0}, {1, 1}, {2, 2}, {0.5, 0.5}});
    REQUIRE(hull.size() == 2);
    CHECK(polygon_area_km2(hull) == 0.0);
    CHECK(convex_contains(hull, {1.5, 1.5}));
    CHECK_FALSE(convex_contains(hull, {1.5, 1.0}));
  }
}

TEST_CASE("hull is counterclockwise and contains every input point") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> d(0.0, 0.05);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<LatLon> pts;
    const int n = 3 + trial % 40;
    for (int i = 0; i < n; ++i) pts.push_back({34.0 + d(gen), -118.0 + d(gen)});
    const auto hull = convex_hull(pts);
    REQUIRE(hull.size() >= 3);
    CHECK(signed_area_deg2(hull) > 0.0);
    for (const auto& p : pts) CHECK(convex_contains(hull, p));
    CHECK(convex_contains(hull, polygon_centroid(hull)));
  }
}

TEST_CASE("polygon area against the flat-earth square") {
  // A 0.01 degree square on the equator is close to (0.01 * 111.195 km)^2.
  const auto hull = convex_hull({{0, 0}, {0, 0.01}, {0.01, 0}, {0.01, 0.01}});
  const double side = 0.01 * std::numbers::pi / 180.0 * 6371.0;
  CHECK(polygon_area_km2(hull) == doctest::Approx(side * side).epsilon(1e-4));

  // At latitude 60 the east-west side shrinks by cos(60) = 0.5.
  const auto north = convex_hull({{60, 0}, {60, 0.01}, {60.01, 0}, {60.01, 0.01}});
  CHECK(polygon_area_km2(north) == doctest::Approx(side * side * 0.5).epsilon(2e-3));
}

TEST_CASE("hilbert index is a bijection with adjacent steps") {
  const int bits = 4;
  const std::uint32_t n = 1u << bits;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> by_index(n * n);
  std::set<std::uint64_t> seen;
  for (std::uint32_t x = 0; x < n; ++x) {
    for (std::uint32_t y = 0; y < n; ++y) {
      const auto d = hilbert_index(x, y, bits);
      REQUIRE(d < n * n);
      seen.insert(d);
      by_index[d] = {x, y};
    }
  }
  CHECK(seen.size() == n * n);
  for (std::size_t d = 1; d < by_index.size(); ++d) {
    const auto [x0, y0] = by_index[d - 1];
    const auto [x1, y1] = by_index[d];
    const auto manhattan = (x0 > x1 ? x0 - x1 : x1 - x0) + (y0 > y1 ? y0 - y1 : y1 - y0);
    CHECK(manhattan == 1);
  }
  CHECK(hilbert_index(0, 0, bits) == 0);
}

TEST_CASE("coordinate validity") {
  CHECK(is_valid({90.0, 180.0}));
  CHECK_FALSE(is_valid({91.0, 0.0}));
  CHECK_FALSE(is_valid({0.0, -180.5}));
  CHECK_FALSE(is_valid({std::nan(""), 0.0}));
}
