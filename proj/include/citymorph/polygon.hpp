#ifndef CITYMORPH_POLYGON_HPP
#define CITYMORPH_POLYGON_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "citymorph/error.hpp"
#include "citymorph/geo.hpp"
#include "citymorph/graph.hpp"

namespace citymorph {

/// Rings are stored open: the closing vertex is implicit and a repeated
/// first vertex is stripped on construction.
using Ring = std::vector<GeoPoint>;

/// rings[0] is the outer ring, the rest are holes.
struct Polygon {
  std::vector<Ring> rings;
};

struct CityBoundary {
  std::string city_name;
  std::vector<Polygon> polygons;
};

/// Strips a closing duplicate vertex and checks the >= 3 vertex rule.
inline Ring normalize_ring(Ring ring, const std::string& city) {
  if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
  if (ring.size() < 3) throw DataError("boundary '" + city + "' has a ring with fewer than 3 vertices");
  for (const auto& p : ring)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw DataError("boundary '" + city + "' has a non-finite vertex");
  return ring;
}

inline CityBoundary make_boundary(std::string name, std::vector<Polygon> polygons) {
  if (polygons.empty()) throw DataError("boundary '" + name + "' has no polygons");
  for (auto& poly : polygons) {
    if (poly.rings.empty()) throw DataError("boundary '" + name + "' has a polygon without rings");
    for (auto& ring : poly.rings) ring = normalize_ring(std::move(ring), name);
  }
  return {std::move(name), std::move(polygons)};
}

namespace detail {

inline bool on_segment(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
  const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
  const double scale = std::max({std::abs(a.x), std::abs(a.y), std::abs(b.x), std::abs(b.y),
                                 std::abs(p.x), std::abs(p.y), 1.0});
  const double seg = std::hypot(b.x - a.x, b.y - a.y);
  if (std::abs(cross) > 1e-12 * scale * std::max(seg, 1e-300)) return false;
  return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) && p.y >= std::min(a.y, b.y) &&
         p.y <= std::max(a.y, b.y);
}

inline bool on_ring(const GeoPoint& p, const Ring& ring) {
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++)
    if (on_segment(p, ring[j], ring[i])) return true;
  return false;
}

// Even-odd crossing test against a single ring, half-open on y.
inline bool crosses_odd(const GeoPoint& p, const Ring& ring) {
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

inline double ring_area_planar(const Ring& ring) {
  double twice = 0.0;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++)
    twice += ring[j].x * ring[i].y - ring[i].x * ring[j].y;
  return std::abs(twice) / 2.0;
}

// Spherical ring area (Chamberlain & Duquette), m^2.
inline double ring_area_spherical(const Ring& ring) {
  double sum = 0.0;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    double dlon = ring[i].x - ring[j].x;
    if (dlon > 180.0) dlon -= 360.0;
    if (dlon < -180.0) dlon += 360.0;
    sum += deg2rad(dlon) * (2.0 + std::sin(deg2rad(ring[j].y)) + std::sin(deg2rad(ring[i].y)));
  }
  return std::abs(sum) * kEarthRadiusM * kEarthRadiusM / 2.0;
}

}  // namespace detail

/// Boundary-inclusive even-odd point-in-polygon test. Holes exclude their
/// interior but their edges count as inside.
inline bool point_in_polygon(const GeoPoint& p, const CityBoundary& boundary) {
  for (const auto& poly : boundary.polygons) {
    bool odd = false;
    for (const auto& ring : poly.rings) {
      if (detail::on_ring(p, ring)) return true;
      if (detail::crosses_odd(p, ring)) odd = !odd;
    }
    if (odd) return true;
  }
  return false;
}

/// Boundary area in km^2: shoelace in planar mode, spherical in geographic.
inline double boundary_area_km2(const CityBoundary& boundary, CoordMode mode) {
  double m2 = 0.0;
  for (const auto& poly : boundary.polygons) {
    for (std::size_t r = 0; r < poly.rings.size(); ++r) {
      const double a = mode == CoordMode::planar ? detail::ring_area_planar(poly.rings[r])
                                                 : detail::ring_area_spherical(poly.rings[r]);
      m2 += r == 0 ? a : -a;
    }
  }
  return m2 / 1e6;
}

/// A road graph restricted to one city.
struct CityNetwork {
  std::string city_name;
  RoadGraph graph;
  double area_km2 = 0.0;
};

/// Induced subgraph on the nodes inside (or on) the boundary. Throws
/// EmptyCityError when no node survives.
inline CityNetwork clip_to_city(const RoadGraph& graph, const CityBoundary& boundary) {
  if (graph.empty()) throw EmptyCityError(boundary.city_name);

  double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
  double max_x = -min_x, max_y = -min_x;
  for (const auto& poly : boundary.polygons)
    for (const auto& p : poly.rings.front()) {
      min_x = std::min(min_x, p.x);
      max_x = std::max(max_x, p.x);
      min_y = std::min(min_y, p.y);
      max_y = std::max(max_y, p.y);
    }

  std::vector<bool> keep(graph.node_count(), false);
  std::size_t kept = 0;
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    const GeoPoint& p = graph.nodes()[i].location;
    if (p.x < min_x || p.x > max_x || p.y < min_y || p.y > max_y) continue;
    if (point_in_polygon(p, boundary)) {
      keep[i] = true;
      ++kept;
    }
  }
  if (kept == 0) throw EmptyCityError(boundary.city_name);

  const double area = boundary_area_km2(boundary, graph.mode());
  if (!(area > 0.0)) throw DataError("boundary '" + boundary.city_name + "' has zero area");
  return {boundary.city_name, graph.induced(keep), area};
}

}  // namespace citymorph

#endif  // CITYMORPH_POLYGON_HPP
