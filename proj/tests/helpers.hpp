#ifndef CITYMORPH_TESTS_HELPERS_HPP
#define CITYMORPH_TESTS_HELPERS_HPP

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "citymorph/citymorph.hpp"

namespace testing_util {

using namespace citymorph;

struct N {
  std::string id;
  double x, y;
};

struct L {
  std::string id, from, to;
  std::vector<GeoPoint> shape = {};
  std::optional<double> length = std::nullopt;
};

inline RoadGraph make_graph(const std::vector<N>& nodes, const std::vector<L>& links,
                            CoordMode mode = CoordMode::planar) {
  std::vector<RoadNode> ns;
  for (const auto& n : nodes) ns.push_back({n.id, {n.x, n.y}});
  std::vector<LinkSpec> ls;
  for (const auto& l : links) ls.push_back({l.id, l.from, l.to, l.shape, l.length});
  return RoadGraph::build(std::move(ns), std::move(ls), mode);
}

inline CityNetwork as_city(RoadGraph g, double area_km2 = 1.0, std::string name = "c") {
  return CityNetwork{std::move(name), std::move(g), area_km2};
}

inline CityBoundary rect(double x0, double y0, double x1, double y1, std::string name = "c") {
  return make_boundary(std::move(name), {Polygon{{Ring{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}}}});
}

/// side x side two-way planar lattice, row-major ids "r_c".
inline RoadGraph grid_graph(int side, double spacing = 100.0) {
  std::vector<N> nodes;
  std::vector<L> links;
  auto id = [](int r, int c) { return std::to_string(r) + "_" + std::to_string(c); };
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) nodes.push_back({id(r, c), c * spacing, r * spacing});
  int e = 0;
  auto both = [&](const std::string& a, const std::string& b) {
    links.push_back({"l" + std::to_string(e++), a, b});
    links.push_back({"l" + std::to_string(e++), b, a});
  };
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) {
      if (c + 1 < side) both(id(r, c), id(r, c + 1));
      if (r + 1 < side) both(id(r, c), id(r + 1, c));
    }
  return make_graph(nodes, links);
}

/// Rotates every coordinate (nodes and shape points) counterclockwise about `center`.
inline CityNetwork rotate(const CityNetwork& city, double deg, GeoPoint center = {0.0, 0.0}) {
  const double t = deg * std::numbers::pi / 180.0;
  auto rot = [&](GeoPoint p) {
    const double dx = p.x - center.x, dy = p.y - center.y;
    return GeoPoint{center.x + dx * std::cos(t) - dy * std::sin(t), center.y + dx * std::sin(t) + dy * std::cos(t)};
  };
  std::vector<RoadNode> nodes;
  for (const auto& n : city.graph.nodes()) nodes.push_back({n.id, rot(n.location)});
  std::vector<LinkSpec> links;
  for (const auto& l : city.graph.links()) {
    std::vector<GeoPoint> shape;
    for (const auto& p : l.shape_points) shape.push_back(rot(p));
    links.push_back({l.id, l.from, l.to, shape, std::nullopt});
  }
  return {city.city_name, RoadGraph::build(std::move(nodes), std::move(links), city.graph.mode()), city.area_km2};
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("citymorph_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing_util

#endif  // CITYMORPH_TESTS_HELPERS_HPP
