#ifndef CITYMORPH_GEOMETRY_HPP
#define CITYMORPH_GEOMETRY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "citymorph/error.hpp"
#include "citymorph/geo.hpp"
#include "citymorph/graph.hpp"
#include "citymorph/polygon.hpp"

namespace citymorph {

/// Counterclockwise angle in degrees from ray o->a to ray o->b, in [0, 360).
/// Geographic inputs are projected onto the tangent plane at `o` first.
inline double angle(const GeoPoint& a, const GeoPoint& o, const GeoPoint& b, CoordMode mode = CoordMode::planar) {
  const Offset oa = local_offset(o, a, mode);
  const Offset ob = local_offset(o, b, mode);
  if ((oa.dx == 0.0 && oa.dy == 0.0) || (ob.dx == 0.0 && ob.dy == 0.0))
    throw DegenerateGeometryError("angle vertex (" + std::to_string(o.x) + ", " + std::to_string(o.y) + ")");
  double deg = rad2deg(std::atan2(ob.dy, ob.dx) - std::atan2(oa.dy, oa.dx));
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

/// The point fixing a link's initial direction at its start node: the first
/// shape point distinct from the start, else the end node.
inline GeoPoint outgoing_ray(const RoadLink& link, const RoadGraph& graph) {
  const GeoPoint& start = graph.nodes()[link.from_index].location;
  for (const auto& p : link.shape_points)
    if (!(p == start)) return p;
  const GeoPoint& end = graph.nodes()[link.to_index].location;
  if (end == start) throw DegenerateGeometryError("link '" + link.id + "'");
  return end;
}

/// Compass bearing (0 = north, clockwise) of the link's initial direction.
inline double link_bearing(const RoadLink& link, const RoadGraph& graph) {
  const GeoPoint& start = graph.nodes()[link.from_index].location;
  const GeoPoint target = outgoing_ray(link, graph);
  double deg = 0.0;
  if (graph.mode() == CoordMode::planar) {
    deg = rad2deg(std::atan2(target.x - start.x, target.y - start.y));
  } else {
    const double phi1 = deg2rad(start.y);
    const double phi2 = deg2rad(target.y);
    const double dlambda = deg2rad(target.x - start.x);
    deg = rad2deg(std::atan2(std::sin(dlambda) * std::cos(phi2),
                             std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dlambda)));
  }
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

/// Consecutive counterclockwise gaps between the outgoing rays of node `i`,
/// wrap-around gap last. Sums to 360; coincident rays give zero gaps.
inline std::vector<double> node_angles(std::size_t i, const RoadGraph& graph) {
  const auto& out = graph.out_links(i);
  const GeoPoint& o = graph.nodes()[i].location;
  std::vector<double> dirs;
  dirs.reserve(out.size());
  for (std::size_t e : out) {
    const Offset d = local_offset(o, outgoing_ray(graph.links()[e], graph), graph.mode());
    double deg = rad2deg(std::atan2(d.dy, d.dx));
    if (deg < 0.0) deg += 360.0;
    if (deg >= 360.0) deg -= 360.0;
    dirs.push_back(deg);
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<double> gaps;
  if (dirs.size() < 2) return gaps;
  gaps.reserve(dirs.size());
  for (std::size_t k = 1; k < dirs.size(); ++k) {
    const double g = dirs[k] - dirs[k - 1];
    gaps.push_back(g < 1e-9 ? 0.0 : g);
  }
  double used = 0.0;
  for (double g : gaps) used += g;
  gaps.push_back(360.0 - used);
  return gaps;
}

inline std::vector<double> node_angles(const RoadNode& node, const CityNetwork& city) {
  const auto i = city.graph.find_node(node.id);
  if (!i) throw DataError("node '" + node.id + "' is not in city '" + city.city_name + "'");
  return node_angles(*i, city.graph);
}

enum class AngleCategory { acute, right, obtuse, straight, reflex };

inline constexpr double kDefaultAngleTolerance = 10.0;

inline std::string_view to_string(AngleCategory c) {
  switch (c) {
    case AngleCategory::acute: return "acute";
    case AngleCategory::right: return "right";
    case AngleCategory::obtuse: return "obtuse";
    case AngleCategory::straight: return "straight";
    case AngleCategory::reflex: return "reflex";
  }
  return "?";
}

/// Tolerance bands of half-width tau around 90 and 180. For 0 < tau < 45 the
/// categories partition [0, 360).
inline AngleCategory categorize(double deg, double tau = kDefaultAngleTolerance) {
  if (std::abs(deg - 90.0) <= tau) return AngleCategory::right;
  if (std::abs(deg - 180.0) <= tau) return AngleCategory::straight;
  if (deg < 90.0) return AngleCategory::acute;
  if (deg < 180.0) return AngleCategory::obtuse;
  return AngleCategory::reflex;
}

/// Intersection pattern: type 1..7, or 0 when the node geometry is degenerate.
using PatternType = int;
inline constexpr PatternType kPatternOther = 0;
inline constexpr int kPatternTypes = 7;

namespace detail {

struct CategoryTally {
  int acute = 0, right = 0, obtuse = 0, straight = 0, reflex = 0;
};

inline CategoryTally tally(const std::vector<double>& angles, double tau) {
  CategoryTally t;
  for (double a : angles) {
    switch (categorize(a, tau)) {
      case AngleCategory::acute: ++t.acute; break;
      case AngleCategory::right: ++t.right; break;
      case AngleCategory::obtuse: ++t.obtuse; break;
      case AngleCategory::straight: ++t.straight; break;
      case AngleCategory::reflex: ++t.reflex; break;
    }
  }
  return t;
}

}  // namespace detail

// Three-way table, first match wins:
//   1 {right, right, straight}   (T intersection)
//   2 {acute, obtuse, straight}
//   6 any reflex
//   3 {obtuse x3}
//   4 {right, obtuse, obtuse}
//   5 {acute, obtuse, obtuse}
//   7 anything else
inline PatternType classify_degree3(const std::vector<double>& angles, double tau) {
  const auto t = detail::tally(angles, tau);
  if (t.right == 2 && t.straight == 1) return 1;
  if (t.acute == 1 && t.obtuse == 1 && t.straight == 1) return 2;
  if (t.reflex > 0) return 6;
  if (t.obtuse == 3) return 3;
  if (t.right == 1 && t.obtuse == 2) return 4;
  if (t.acute == 1 && t.obtuse == 2) return 5;
  return 7;
}

// Four-way table, first match wins:
//   1 {right x4}
//   3 two right, one acute, one obtuse
//   2 {acute, acute, obtuse, obtuse}
//   4 any straight
//   5 any reflex
//   6 no right angle
//   7 anything else
inline PatternType classify_degree4(const std::vector<double>& angles, double tau) {
  const auto t = detail::tally(angles, tau);
  if (t.right == 4) return 1;
  if (t.right == 2 && t.acute == 1 && t.obtuse == 1) return 3;
  if (t.acute == 2 && t.obtuse == 2) return 2;
  if (t.straight > 0) return 4;
  if (t.reflex > 0) return 5;
  if (t.right == 0) return 6;
  return 7;
}

inline PatternType classify_pattern(const std::vector<double>& angles, int degree, double tau = kDefaultAngleTolerance) {
  if (degree == 3) return classify_degree3(angles, tau);
  if (degree == 4) return classify_degree4(angles, tau);
  throw ValidationError("intersection patterns are defined for degree 3 and 4 only, got " + std::to_string(degree));
}

struct NodePattern {
  std::string node_id;
  int degree = 0;
  PatternType type = kPatternOther;
  std::vector<double> angles;  // sorted counterclockwise, empty when degenerate
};

/// Proportions per type; index 0 is Other, 1..7 the pattern types.
using PatternProportions = std::array<double, kPatternTypes + 1>;

struct PatternCounts {
  PatternProportions d3{};
  PatternProportions d4{};
  std::size_t d3_nodes = 0;
  std::size_t d4_nodes = 0;
};

/// Classifies every node of out-degree 3 or 4. Nodes whose rays cannot be
/// computed are counted as Other.
inline std::vector<NodePattern> node_patterns(const CityNetwork& city, double tau = kDefaultAngleTolerance) {
  const RoadGraph& g = city.graph;
  std::vector<NodePattern> out;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const std::size_t degree = g.out_links(i).size();
    if (degree != 3 && degree != 4) continue;
    NodePattern p;
    p.node_id = g.nodes()[i].id;
    p.degree = static_cast<int>(degree);
    try {
      p.angles = node_angles(i, g);
      p.type = classify_pattern(p.angles, p.degree, tau);
    } catch (const DegenerateGeometryError&) {
      p.angles.clear();
      p.type = kPatternOther;
    }
    out.push_back(std::move(p));
  }
  return out;
}

inline PatternCounts pattern_counts(const std::vector<NodePattern>& patterns) {
  PatternCounts c;
  for (const auto& p : patterns) {
    if (p.degree == 3) {
      c.d3[static_cast<std::size_t>(p.type)] += 1.0;
      ++c.d3_nodes;
    } else if (p.degree == 4) {
      c.d4[static_cast<std::size_t>(p.type)] += 1.0;
      ++c.d4_nodes;
    }
  }
  if (c.d3_nodes)
    for (auto& v : c.d3) v /= static_cast<double>(c.d3_nodes);
  if (c.d4_nodes)
    for (auto& v : c.d4) v /= static_cast<double>(c.d4_nodes);
  return c;
}

inline PatternCounts pattern_counts(const CityNetwork& city, double tau = kDefaultAngleTolerance) {
  return pattern_counts(node_patterns(city, tau));
}

}  // namespace citymorph

#endif  // CITYMORPH_GEOMETRY_HPP
