#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fogcache {

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const LatLon&, const LatLon&) = default;
};

inline constexpr double kEarthRadiusKm = 6371.0;

bool is_valid(LatLon p) noexcept;

// Haversine distance on a sphere of radius kEarthRadiusKm.
double great_circle_distance(LatLon a, LatLon b) noexcept;

// Sum of great-circle distances between consecutive points.
double path_length_km(std::span<const LatLon> points) noexcept;

// Convex hull in the (lon, lat) plane, counterclockwise, without repeated or
// collinear vertices. Returns 1 or 2 points for degenerate inputs.
std::vector<LatLon> convex_hull(std::vector<LatLon> points);

// Signed shoelace area in squared degrees; positive for CCW polygons.
double signed_area_deg2(std::span<const LatLon> polygon) noexcept;

// Area centroid of a simple polygon. Falls back to the vertex mean when the
// polygon has fewer than three vertices or zero area.
LatLon polygon_centroid(std::span<const LatLon> polygon) noexcept;

// Polygon area in km^2 using a local equirectangular projection around the
// vertex mean. Zero for degenerate polygons.
double polygon_area_km2(std::span<const LatLon> polygon) noexcept;

// True if p lies inside or on the boundary of a CCW convex polygon, with an
// absolute tolerance of `eps` degrees. Handles 1- and 2-vertex hulls.
bool convex_contains(std::span<const LatLon> hull, LatLon p, double eps = 1e-9) noexcept;

// Arithmetic mean of the points; (0, 0) for an empty span.
LatLon mean_position(std::span<const LatLon> points) noexcept;

// Position along the Hilbert curve of order `bits` for cell (x, y), where
// both coordinates are < 2^bits and bits <= 32.
std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y, int bits = 16) noexcept;

}  // namespace fogcache
