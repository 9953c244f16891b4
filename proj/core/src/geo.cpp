#include "fogcache/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fogcache {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Cross product of (a->b) x (a->c) in the (lon, lat) plane.
double cross(const LatLon& a, const LatLon& b, const LatLon& c) noexcept {
  return (b.lon - a.lon) * (c.lat - a.lat) - (b.lat - a.lat) * (c.lon - a.lon);
}

}  // namespace

bool is_valid(LatLon p) noexcept {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon >= -180.0 && p.lon <= 180.0;
}

double great_circle_distance(LatLon a, LatLon b) noexcept {
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double dphi = (b.lat - a.lat) * kDegToRad;
  const double dlambda = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

double path_length_km(std::span<const LatLon> points) noexcept {
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i)
    total += great_circle_distance(points[i - 1], points[i]);
  return total;
}

std::vector<LatLon> convex_hull(std::vector<LatLon> points) {
  // Andrew's monotone chain.
  std::sort(points.begin(), points.end(), [](const LatLon& a, const LatLon& b) {
    return a.lon < b.lon || (a.lon == b.lon && a.lat < b.lat);
  });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 3) return points;

  std::vector<LatLon> hull(2 * points.size());
  std::size_t k = 0;
  for (const auto& p : points) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    const auto& p = points[i];
    while (k >= lower && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  // All points collinear: keep the two extremes.
  if (hull.size() == 2 || signed_area_deg2(hull) == 0.0) {
    return {points.front(), points.back()};
  }
  return hull;
}

double signed_area_deg2(std::span<const LatLon> polygon) noexcept {
  if (polygon.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const auto& a = polygon[i];
    const auto& b = polygon[(i + 1) % polygon.size()];
    twice += a.lon * b.lat - b.lon * a.lat;
  }
  return twice / 2.0;
}

LatLon mean_position(std::span<const LatLon> points) noexcept {
  if (points.empty()) return {};
  double lat = 0.0;
  double lon = 0.0;
  for (const auto& p : points) {
    lat += p.lat;
    lon += p.lon;
  }
  const auto n = static_cast<double>(points.size());
  return {lat / n, lon / n};
}

LatLon polygon_centroid(std::span<const LatLon> polygon) noexcept {
  const double area = signed_area_deg2(polygon);
  if (polygon.size() < 3 || area == 0.0) return mean_position(polygon);
  // Offset by the first vertex to limit cancellation.
  const LatLon origin = polygon.front();
  double clat = 0.0;
  double clon = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const double x0 = polygon[i].lon - origin.lon;
    const double y0 = polygon[i].lat - origin.lat;
    const auto& next = polygon[(i + 1) % polygon.size()];
    const double x1 = next.lon - origin.lon;
    const double y1 = next.lat - origin.lat;
    const double w = x0 * y1 - x1 * y0;
    clon += (x0 + x1) * w;
    clat += (y0 + y1) * w;
  }
  return {origin.lat + clat / (6.0 * area), origin.lon + clon / (6.0 * area)};
}

double polygon_area_km2(std::span<const LatLon> polygon) noexcept {
  if (polygon.size() < 3) return 0.0;
  const LatLon ref = mean_position(polygon);
  const double ky = kEarthRadiusKm * kDegToRad;
  const double kx = ky * std::cos(ref.lat * kDegToRad);
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const auto& a = polygon[i];
    const auto& b = polygon[(i + 1) % polygon.size()];
    const double ax = (a.lon - ref.lon) * kx;
    const double ay = (a.lat - ref.lat) * ky;
    const double bx = (b.lon - ref.lon) * kx;
    const double by = (b.lat - ref.lat) * ky;
    twice += ax * by - bx * ay;
  }
  return std::abs(twice) / 2.0;
}

bool convex_contains(std::span<const LatLon> hull, LatLon p, double eps) noexcept {
  if (hull.empty()) return false;
  if (hull.size() == 1) {
    return std::abs(hull[0].lat - p.lat) <= eps && std::abs(hull[0].lon - p.lon) <= eps;
  }
  if (hull.size() == 2) {
    const auto& a = hull[0];
    const auto& b = hull[1];
    const double len = std::hypot(b.lon - a.lon, b.lat - a.lat);
    if (std::abs(cross(a, b, p)) > eps * std::max(len, 1.0)) return false;
    const double dot = (p.lon - a.lon) * (b.lon - a.lon) + (p.lat - a.lat) * (b.lat - a.lat);
    return dot >= -eps * len && dot <= len * len + eps * len;
  }
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    const double len = std::hypot(b.lon - a.lon, b.lat - a.lat);
    if (cross(a, b, p) < -eps * std::max(len, 1.0)) return false;
  }
  return true;
}

std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y, int bits) noexcept {
  std::uint64_t d = 0;
  const std::uint64_t n = std::uint64_t{1} << bits;
  std::uint64_t px = x;
  std::uint64_t py = y;
  for (std::uint64_t s = n / 2; s > 0; s /= 2) {
    const std::uint64_t rx = (px & s) ? 1 : 0;
    const std::uint64_t ry = (py & s) ? 1 : 0;
    d += s * s * ((3 * rx) ^ ry);
    // Rotate the quadrant so the sub-curve has canonical orientation.
    if (ry == 0) {
      if (rx == 1) {
        px = s - 1 - (px & (s - 1));
        py = s - 1 - (py & (s - 1));
      }
      std::swap(px, py);
    }
    px &= (s - 1);
    py &= (s - 1);
  }
  return d;
}

}  // namespace fogcache
