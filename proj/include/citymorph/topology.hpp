#ifndef CITYMORPH_TOPOLOGY_HPP
#define CITYMORPH_TOPOLOGY_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <utility>
#include <vector>

#include "citymorph/error.hpp"
#include "citymorph/graph.hpp"
#include "citymorph/parallel.hpp"
#include "citymorph/polygon.hpp"

namespace citymorph {

/// Degree classes: 0, 1, 2, 3, 4 and 5+ (index 5).
inline constexpr std::size_t kDegreeClasses = 6;

inline std::size_t degree_class(std::size_t degree) { return std::min<std::size_t>(degree, 5); }

struct DegreeProfile {
  std::array<double, kDegreeClasses> proportions_out{};
  std::array<double, kDegreeClasses> proportions_in{};
  double pct_nodes_in_ne_out = 0.0;  // fraction in [0, 1]
};

inline DegreeProfile degree_profile(const CityNetwork& city) {
  const RoadGraph& g = city.graph;
  if (g.empty()) throw EmptyCityError(city.city_name);
  DegreeProfile p;
  std::size_t unequal = 0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const std::size_t out = g.out_links(i).size();
    const std::size_t in = g.in_links(i).size();
    p.proportions_out[degree_class(out)] += 1.0;
    p.proportions_in[degree_class(in)] += 1.0;
    if (in != out) ++unequal;
  }
  const double n = static_cast<double>(g.node_count());
  for (auto& v : p.proportions_out) v /= n;
  for (auto& v : p.proportions_in) v /= n;
  p.pct_nodes_in_ne_out = static_cast<double>(unequal) / n;
  return p;
}

struct CentralitySummary {
  double median_normalized_bc = 0.0;
  std::vector<double> per_node_bc;  // indexed like graph.nodes()
};

inline double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : (values[mid - 1] + values[mid]) / 2.0;
}

/// Relative tolerance under which two path lengths count as equal.
inline constexpr double kPathTieTolerance = 1e-12;

namespace detail {

// Single-source Brandes pass on the length-weighted directed graph; adds the
// dependencies of `source` into `acc`.
struct BrandesScratch {
  std::vector<double> dist;
  std::vector<double> sigma;
  std::vector<double> delta;
  std::vector<std::vector<std::size_t>> preds;
  std::vector<std::size_t> order;

  explicit BrandesScratch(std::size_t n) : dist(n), sigma(n), delta(n), preds(n) { order.reserve(n); }
};

inline void brandes_source(const RoadGraph& g, std::size_t source, BrandesScratch& s, std::vector<double>& acc) {
  const std::size_t n = g.node_count();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::fill(s.dist.begin(), s.dist.end(), inf);
  std::fill(s.sigma.begin(), s.sigma.end(), 0.0);
  std::fill(s.delta.begin(), s.delta.end(), 0.0);
  for (auto& p : s.preds) p.clear();
  s.order.clear();

  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  std::vector<bool> settled(n, false);
  s.dist[source] = 0.0;
  s.sigma[source] = 1.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (settled[v]) continue;
    settled[v] = true;
    s.order.push_back(v);
    for (std::size_t e : g.out_links(v)) {
      const RoadLink& link = g.links()[e];
      const std::size_t w = link.to_index;
      if (settled[w]) continue;
      const double nd = d + link.length_m;
      if (nd < s.dist[w] * (1.0 - kPathTieTolerance)) {
        s.dist[w] = nd;
        s.sigma[w] = s.sigma[v];
        s.preds[w].assign(1, v);
        heap.push({nd, w});
      } else if (nd <= s.dist[w] * (1.0 + kPathTieTolerance)) {
        s.sigma[w] += s.sigma[v];
        s.preds[w].push_back(v);
      }
    }
  }
  for (auto it = s.order.rbegin(); it != s.order.rend(); ++it) {
    const std::size_t w = *it;
    for (std::size_t v : s.preds[w]) s.delta[v] += s.sigma[v] / s.sigma[w] * (1.0 + s.delta[w]);
    if (w != source) acc[w] += s.delta[w];
  }
}

}  // namespace detail

/// Raw (unnormalized) betweenness: sum over ordered pairs (a, b), a != b,
/// both != i, of sigma_ab(i) / sigma_ab. Unreachable pairs contribute 0.
/// Sources are processed in fixed blocks so the summation order, and hence
/// the result, does not depend on the thread count.
inline std::vector<double> raw_betweenness(const RoadGraph& g, unsigned max_threads = 0) {
  const std::size_t n = g.node_count();
  constexpr std::size_t block = 32;
  const std::size_t blocks = (n + block - 1) / block;
  std::vector<std::vector<double>> partial(blocks);
  parallel_for(
      blocks,
      [&](std::size_t b) {
        detail::BrandesScratch scratch(n);
        partial[b].assign(n, 0.0);
        for (std::size_t src = b * block; src < std::min(n, (b + 1) * block); ++src)
          detail::brandes_source(g, src, scratch, partial[b]);
      },
      max_threads);
  std::vector<double> bc(n, 0.0);
  for (const auto& p : partial)
    for (std::size_t i = 0; i < n; ++i) bc[i] += p[i];
  return bc;
}

/// Betweenness normalized by the node count, with its median.
inline CentralitySummary betweenness(const CityNetwork& city, unsigned max_threads = 0) {
  if (city.graph.empty()) throw EmptyCityError(city.city_name);
  CentralitySummary out;
  out.per_node_bc = raw_betweenness(city.graph, max_threads);
  const double n = static_cast<double>(city.graph.node_count());
  for (auto& v : out.per_node_bc) v /= n;
  out.median_normalized_bc = median(out.per_node_bc);
  return out;
}

/// An undirected street: one or two directed links between the same nodes.
struct UndirectedEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double length_m = 0.0;
};

/// Opposing directed links with the same endpoints and lengths within 1 m
/// collapse into one edge (length = their mean). Unmatched links, including
/// parallel links in the same direction, stay separate edges.
inline std::vector<UndirectedEdge> undirected_edges(const RoadGraph& g) {
  // key: (min, max) node index -> forward (min->max) and backward link indices
  std::map<std::pair<std::size_t, std::size_t>, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> groups;
  for (std::size_t e = 0; e < g.link_count(); ++e) {
    const auto& l = g.links()[e];
    const auto key = std::minmax(l.from_index, l.to_index);
    auto& slot = groups[{key.first, key.second}];
    (l.from_index == key.first ? slot.first : slot.second).push_back(e);
  }
  std::vector<UndirectedEdge> edges;
  auto length_of = [&](std::size_t e) { return g.links()[e].length_m; };
  for (auto& [key, dirs] : groups) {
    auto& [fwd, bwd] = dirs;
    auto by_length = [&](std::size_t x, std::size_t y) {
      return length_of(x) != length_of(y) ? length_of(x) < length_of(y) : x < y;
    };
    std::sort(fwd.begin(), fwd.end(), by_length);
    std::sort(bwd.begin(), bwd.end(), by_length);
    std::vector<bool> used(bwd.size(), false);
    for (std::size_t f : fwd) {
      std::size_t match = bwd.size();
      double best = 1.0;
      for (std::size_t j = 0; j < bwd.size(); ++j) {
        if (used[j]) continue;
        const double diff = std::abs(length_of(f) - length_of(bwd[j]));
        if (diff <= best) {
          if (match == bwd.size() || diff < best) match = j;
          best = diff;
        }
      }
      if (match < bwd.size()) {
        used[match] = true;
        edges.push_back({key.first, key.second, (length_of(f) + length_of(bwd[match])) / 2.0});
      } else {
        edges.push_back({key.first, key.second, length_of(f)});
      }
    }
    for (std::size_t j = 0; j < bwd.size(); ++j)
      if (!used[j]) edges.push_back({key.first, key.second, length_of(bwd[j])});
  }
  return edges;
}

struct GeometricSummary {
  std::size_t undirected_edge_count = 0;
  double total_length_km = 0.0;
  double link_node_ratio = 0.0;
  double network_density = 0.0;   // km of street per km^2
  double mean_link_length = 0.0;  // meters
};

inline GeometricSummary geometric_summaries(const CityNetwork& city) {
  if (city.graph.empty()) throw EmptyCityError(city.city_name);
  if (!(city.area_km2 > 0.0)) throw DataError("city '" + city.city_name + "' has non-positive area");
  const auto edges = undirected_edges(city.graph);
  GeometricSummary s;
  s.undirected_edge_count = edges.size();
  double total_m = 0.0;
  for (const auto& e : edges) total_m += e.length_m;
  s.total_length_km = total_m / 1000.0;
  s.link_node_ratio = static_cast<double>(edges.size()) / static_cast<double>(city.graph.node_count());
  s.network_density = s.total_length_km / city.area_km2;
  s.mean_link_length = edges.empty() ? 0.0 : total_m / static_cast<double>(edges.size());
  return s;
}

struct TopoMetrics {
  DegreeProfile degree_profile;
  CentralitySummary centrality;
  double link_node_ratio = 0.0;
  double network_density = 0.0;
  double mean_link_length = 0.0;
};

inline TopoMetrics topo_metrics(const CityNetwork& city, unsigned max_threads = 0) {
  TopoMetrics m;
  m.degree_profile = degree_profile(city);
  m.centrality = betweenness(city, max_threads);
  const auto s = geometric_summaries(city);
  m.link_node_ratio = s.link_node_ratio;
  m.network_density = s.network_density;
  m.mean_link_length = s.mean_link_length;
  return m;
}

}  // namespace citymorph

#endif  // CITYMORPH_TOPOLOGY_HPP
