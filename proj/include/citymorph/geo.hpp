#ifndef CITYMORPH_GEO_HPP
#define CITYMORPH_GEO_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <string_view>

#include "citymorph/error.hpp"

namespace citymorph {

/// Coordinate interpretation for a whole run.
enum class CoordMode {
  geographic,  // x = longitude, y = latitude, degrees (WGS84)
  planar,      // x, y in meters
};

inline std::string_view to_string(CoordMode mode) {
  return mode == CoordMode::geographic ? "geo" : "planar";
}

inline CoordMode parse_coord_mode(std::string_view s) {
  if (s == "geo" || s == "geographic") return CoordMode::geographic;
  if (s == "planar") return CoordMode::planar;
  throw ValidationError("unknown coordinate mode '" + std::string(s) + "' (expected geo or planar)");
}

struct GeoPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

// WGS84 semi-major axis. Haversine on this sphere is exact along the equator.
inline constexpr double kEarthRadiusM = 6378137.0;

inline constexpr double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
inline constexpr double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

inline bool is_valid(const GeoPoint& p, CoordMode mode) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
  if (mode == CoordMode::geographic)
    return p.x >= -180.0 && p.x <= 180.0 && p.y >= -90.0 && p.y <= 90.0;
  return true;
}

inline double haversine_m(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = deg2rad(a.y);
  const double phi2 = deg2rad(b.y);
  const double dphi = phi2 - phi1;
  const double dlambda = deg2rad(b.x - a.x);
  const double s = std::sin(dphi / 2) * std::sin(dphi / 2) +
                   std::cos(phi1) * std::cos(phi2) * std::sin(dlambda / 2) * std::sin(dlambda / 2);
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(s)));
}

/// Distance in meters between two points of the given mode.
inline double distance_m(const GeoPoint& a, const GeoPoint& b, CoordMode mode) {
  if (mode == CoordMode::planar) return std::hypot(b.x - a.x, b.y - a.y);
  return haversine_m(a, b);
}

/// Length of the polyline through `points` in meters.
inline double polyline_length_m(std::span<const GeoPoint> points, CoordMode mode) {
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) total += distance_m(points[i - 1], points[i], mode);
  return total;
}

/// Planar offset of `p` relative to `origin`. In geographic mode this is an
/// equirectangular projection onto the tangent plane at `origin`, in meters.
struct Offset {
  double dx = 0.0;
  double dy = 0.0;
};

inline Offset local_offset(const GeoPoint& origin, const GeoPoint& p, CoordMode mode) {
  if (mode == CoordMode::planar) return {p.x - origin.x, p.y - origin.y};
  constexpr double m_per_deg = kEarthRadiusM * std::numbers::pi / 180.0;
  double dlon = p.x - origin.x;
  if (dlon > 180.0) dlon -= 360.0;
  if (dlon < -180.0) dlon += 360.0;
  return {dlon * std::cos(deg2rad(origin.y)) * m_per_deg, (p.y - origin.y) * m_per_deg};
}

}  // namespace citymorph

#endif  // CITYMORPH_GEO_HPP
