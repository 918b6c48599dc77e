#ifndef CITYMORPH_SYNTH_HPP
#define CITYMORPH_SYNTH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "citymorph/error.hpp"
#include "citymorph/geo.hpp"
#include "citymorph/graph.hpp"
#include "citymorph/polygon.hpp"
#include "citymorph/random.hpp"

namespace citymorph {

enum class Archetype { gridded, orthogonal, organic };

inline constexpr Archetype kArchetypes[] = {Archetype::gridded, Archetype::orthogonal, Archetype::organic};

inline std::string_view to_string(Archetype a) {
  switch (a) {
    case Archetype::gridded: return "gridded";
    case Archetype::orthogonal: return "orthogonal";
    case Archetype::organic: return "organic";
  }
  return "?";
}

inline Archetype parse_archetype(std::string_view s) {
  for (Archetype a : kArchetypes)
    if (to_string(a) == s) return a;
  throw ValidationError("unknown archetype '" + std::string(s) + "' (expected gridded, orthogonal or organic)");
}

struct ArchetypeSpec {
  Archetype kind = Archetype::gridded;
  int size = 100;              // target node count of the underlying lattice
  double spacing = 100.0;      // meters between lattice neighbours
  double jitter = 0.0;         // node displacement as a fraction of spacing
  double dead_end_rate = 0.0;  // target share of dead ends (orthogonal, organic)
  std::uint64_t seed = 0;
};

inline void validate(const ArchetypeSpec& spec) {
  if (spec.size < 9) throw ValidationError("archetype size must be at least 9 nodes, got " + std::to_string(spec.size));
  if (!(spec.spacing > 0.0)) throw ValidationError("archetype spacing must be positive");
  if (!(spec.jitter >= 0.0 && spec.jitter < 0.5)) throw ValidationError("archetype jitter must be in [0, 0.5)");
  if (!(spec.dead_end_rate >= 0.0 && spec.dead_end_rate < 1.0))
    throw ValidationError("archetype dead_end_rate must be in [0, 1)");
}

struct SyntheticCity {
  CityNetwork city;
  CityBoundary boundary;
  Archetype kind = Archetype::gridded;
};

namespace detail {

struct Sketch {
  std::vector<GeoPoint> pos;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // undirected
  std::vector<std::pair<GeoPoint, GeoPoint>> curves;       // organic: shape points per edge
};

inline GeoPoint polar(const GeoPoint& o, double len, double deg) {
  return {o.x + len * std::cos(deg2rad(deg)), o.y + len * std::sin(deg2rad(deg))};
}

inline double direction_deg(const GeoPoint& from, const GeoPoint& to) {
  double d = rad2deg(std::atan2(to.y - from.y, to.x - from.x));
  return d < 0.0 ? d + 360.0 : d;
}

inline int lattice_side(int size) { return std::max(3, static_cast<int>(std::lround(std::sqrt(size)))); }

inline Sketch lattice(int side, const ArchetypeSpec& spec, Rng& rng, bool brick) {
  Sketch s;
  const double j = spec.jitter * spec.spacing;
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c)
      s.pos.push_back({c * spec.spacing + (j > 0 ? rng.uniform(-j, j) : 0.0),
                       r * spec.spacing + (j > 0 ? rng.uniform(-j, j) : 0.0)});
  auto id = [side](int r, int c) { return static_cast<std::size_t>(r * side + c); };
  for (int r = 0; r < side; ++r)
    for (int c = 0; c + 1 < side; ++c) s.edges.push_back({id(r, c), id(r, c + 1)});
  for (int r = 0; r + 1 < side; ++r)
    for (int c = 0; c < side; ++c)
      if (!brick || (r + c) % 2 == 0) s.edges.push_back({id(r, c), id(r + 1, c)});
  return s;
}

// Splits a share of the E-W edges at their midpoint and hangs a
// perpendicular cul-de-sac off the new node.
inline void add_culs_de_sac(Sketch& s, std::size_t horizontal_edges, const ArchetypeSpec& spec, Rng& rng) {
  const double n = static_cast<double>(s.pos.size());
  const double rate = spec.dead_end_rate;
  std::size_t spurs = rate >= 0.5 ? horizontal_edges
                                  : static_cast<std::size_t>(std::lround(rate * n / (1.0 - 2.0 * rate)));
  spurs = std::min(spurs, horizontal_edges);
  std::vector<std::size_t> order(horizontal_edges);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
  order.resize(spurs);
  std::sort(order.begin(), order.end());
  for (std::size_t e : order) {
    const auto [a, b] = s.edges[e];
    const GeoPoint pa = s.pos[a], pb = s.pos[b];
    const GeoPoint mid{(pa.x + pb.x) / 2.0, (pa.y + pb.y) / 2.0};
    const double dir = direction_deg(pa, pb) + (rng.bernoulli(0.5) ? 90.0 : -90.0);
    const std::size_t m = s.pos.size();
    s.pos.push_back(mid);
    s.pos.push_back(polar(mid, 0.4 * spec.spacing, dir));
    s.edges[e] = {a, m};
    s.edges.push_back({m, b});
    s.edges.push_back({m, m + 1});
  }
}

// Organic geometry: every node's outgoing rays get a fresh circular
// partition whose gaps avoid the right and straight bands, under a random
// node rotation. The ray direction becomes the first shape point of each
// link, so streets wind between nodes.
inline void bend_links(Sketch& s, Rng& rng) {
  const std::size_t n = s.pos.size();
  std::vector<std::vector<std::pair<std::size_t, bool>>> ends(n);  // (edge, is_first_endpoint)
  for (std::size_t e = 0; e < s.edges.size(); ++e) {
    ends[s.edges[e].first].push_back({e, true});
    ends[s.edges[e].second].push_back({e, false});
  }
  std::vector<double> ray_first(s.edges.size()), ray_second(s.edges.size());
  auto near_band = [](double g) { return std::abs(g - 90.0) < 15.0 || std::abs(g - 180.0) < 15.0; };
  for (std::size_t v = 0; v < n; ++v) {
    auto& inc = ends[v];
    if (inc.empty()) continue;
    auto chord = [&](const std::pair<std::size_t, bool>& end) {
      const auto [a, b] = s.edges[end.first];
      return end.second ? direction_deg(s.pos[a], s.pos[b]) : direction_deg(s.pos[b], s.pos[a]);
    };
    std::sort(inc.begin(), inc.end(), [&](const auto& x, const auto& y) { return chord(x) < chord(y); });
    const std::size_t d = inc.size();
    std::vector<double> gaps(d, 360.0);
    if (d > 1) {
      for (int attempt = 0; attempt < 200; ++attempt) {
        double total = 0.0;
        for (auto& g : gaps) total += (g = rng.uniform(0.35, 1.65));
        bool ok = true;
        for (auto& g : gaps) {
          g *= 360.0 / total;
          if (near_band(g) || g < 20.0) ok = false;
        }
        if (ok) break;
      }
    }
    // Rotation that keeps rays near their chords, plus a random swing.
    double sx = 0.0, sy = 0.0, cum = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double off = deg2rad(chord(inc[i]) - cum);
      sx += std::cos(off);
      sy += std::sin(off);
      cum += gaps[i];
    }
    double rot = rad2deg(std::atan2(sy, sx)) + rng.uniform(-45.0, 45.0);
    cum = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double dir = rot + cum;
      (inc[i].second ? ray_first : ray_second)[inc[i].first] = dir;
      cum += gaps[i];
    }
  }
  s.curves.resize(s.edges.size());
  for (std::size_t e = 0; e < s.edges.size(); ++e) {
    const auto [a, b] = s.edges[e];
    const double len = std::hypot(s.pos[b].x - s.pos[a].x, s.pos[b].y - s.pos[a].y);
    s.curves[e] = {polar(s.pos[a], 0.3 * len, ray_first[e]), polar(s.pos[b], 0.3 * len, ray_second[e])};
  }
}

inline std::vector<GeoPoint> convex_hull(std::vector<GeoPoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const GeoPoint& a, const GeoPoint& b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  auto cross = [](const GeoPoint& o, const GeoPoint& a, const GeoPoint& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  std::vector<GeoPoint> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

// Convex hull grown by `buffer` (hull of 16-gon offsets of each vertex).
inline Ring buffered_hull(const std::vector<GeoPoint>& pts, double buffer) {
  std::vector<GeoPoint> grown;
  for (const auto& p : convex_hull(pts))
    for (int k = 0; k < 16; ++k) grown.push_back(polar(p, buffer, 22.5 * k));
  return convex_hull(std::move(grown));
}

}  // namespace detail

/// Builds one synthetic planar city. Node ids are `<prefix>n<index>`, link
/// ids `<prefix>l<index>`. `offset` shifts every coordinate.
inline SyntheticCity generate_city(const ArchetypeSpec& spec, const std::string& name, const std::string& prefix = "",
                                   GeoPoint offset = {}) {
  validate(spec);
  Rng rng(spec.seed);
  const int side = detail::lattice_side(spec.size);
  detail::Sketch s;
  switch (spec.kind) {
    case Archetype::gridded:
      s = detail::lattice(side, spec, rng, false);
      break;
    case Archetype::orthogonal:
    case Archetype::organic: {
      s = detail::lattice(side, spec, rng, true);
      detail::add_culs_de_sac(s, static_cast<std::size_t>(side * (side - 1)), spec, rng);
      if (spec.kind == Archetype::organic) detail::bend_links(s, rng);
      break;
    }
  }

  for (auto& p : s.pos) p = {p.x + offset.x, p.y + offset.y};
  for (auto& [p1, p2] : s.curves) {
    p1 = {p1.x + offset.x, p1.y + offset.y};
    p2 = {p2.x + offset.x, p2.y + offset.y};
  }

  std::vector<RoadNode> nodes;
  nodes.reserve(s.pos.size());
  for (std::size_t i = 0; i < s.pos.size(); ++i) nodes.push_back({prefix + "n" + std::to_string(i), s.pos[i]});
  std::vector<LinkSpec> links;
  links.reserve(2 * s.edges.size());
  for (std::size_t e = 0; e < s.edges.size(); ++e) {
    const auto [a, b] = s.edges[e];
    LinkSpec fwd{prefix + "l" + std::to_string(2 * e), nodes[a].id, nodes[b].id, {}, std::nullopt};
    LinkSpec bwd{prefix + "l" + std::to_string(2 * e + 1), nodes[b].id, nodes[a].id, {}, std::nullopt};
    if (!s.curves.empty()) {
      fwd.shape_points = {s.curves[e].first, s.curves[e].second};
      bwd.shape_points = {s.curves[e].second, s.curves[e].first};
    }
    links.push_back(std::move(fwd));
    links.push_back(std::move(bwd));
  }

  std::vector<GeoPoint> extent = s.pos;
  for (const auto& [p1, p2] : s.curves) {
    extent.push_back(p1);
    extent.push_back(p2);
  }
  CityBoundary boundary = make_boundary(name, {Polygon{{detail::buffered_hull(extent, spec.spacing)}}});

  SyntheticCity out;
  out.kind = spec.kind;
  out.city.city_name = name;
  out.city.graph = RoadGraph::build(std::move(nodes), std::move(links), CoordMode::planar);
  out.city.area_km2 = boundary_area_km2(boundary, CoordMode::planar);
  out.boundary = std::move(boundary);
  return out;
}

inline CityNetwork generate(const ArchetypeSpec& spec) {
  return generate_city(spec, std::string(to_string(spec.kind))).city;
}

/// Per-archetype parameter ranges used for corpora. Sizes, spacings and
/// dead-end rates overlap between orthogonal and organic on purpose: only
/// intersection geometry and bearings tell them apart.
inline ArchetypeSpec sample_spec(Archetype kind, Rng& rng) {
  ArchetypeSpec spec;
  spec.kind = kind;
  spec.seed = rng.next();
  spec.size = static_cast<int>(rng.uniform(64.0, 144.0));
  spec.spacing = rng.uniform(90.0, 150.0);
  switch (kind) {
    case Archetype::gridded:
      spec.jitter = 0.02;
      break;
    case Archetype::orthogonal:
      spec.jitter = 0.02;
      spec.dead_end_rate = rng.uniform(0.2, 0.35);
      break;
    case Archetype::organic:
      spec.jitter = 0.3;
      spec.dead_end_rate = rng.uniform(0.2, 0.35);
      break;
  }
  return spec;
}

/// `count` cities of each requested archetype laid out on a row 100 km
/// apart so they can share one regional graph. Names are `<kind>_<nn>`.
/// `size`, when given, replaces the sampled node-count target.
inline std::vector<SyntheticCity> generate_corpus(const std::vector<Archetype>& kinds, int count, std::uint64_t seed,
                                                  std::optional<int> size = std::nullopt) {
  if (count < 1) throw ValidationError("count must be >= 1");
  std::vector<SyntheticCity> out;
  std::size_t slot = 0;
  for (Archetype kind : kinds) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(kind)));
    for (int i = 0; i < count; ++i, ++slot) {
      ArchetypeSpec spec = sample_spec(kind, rng);
      if (size) spec.size = *size;
      const std::string name = std::string(to_string(kind)) + "_" + (i < 10 ? "0" : "") + std::to_string(i);
      out.push_back(generate_city(spec, name, name + "/", {static_cast<double>(slot) * 100000.0, 0.0}));
    }
  }
  return out;
}

}  // namespace citymorph

#endif  // CITYMORPH_SYNTH_HPP
