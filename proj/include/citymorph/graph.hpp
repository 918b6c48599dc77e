#ifndef CITYMORPH_GRAPH_HPP
#define CITYMORPH_GRAPH_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "citymorph/error.hpp"
#include "citymorph/geo.hpp"

namespace citymorph {

struct RoadNode {
  std::string id;
  GeoPoint location;

  friend bool operator==(const RoadNode&, const RoadNode&) = default;
};

/// A directed link as read from input; length may be absent.
struct LinkSpec {
  std::string id;
  std::string from;
  std::string to;
  std::vector<GeoPoint> shape_points;
  std::optional<double> length_m;
};

/// A validated directed link. Direction is the permitted flow from -> to;
/// a two-way street is two opposing links.
struct RoadLink {
  std::string id;
  std::string from;
  std::string to;
  std::size_t from_index = 0;
  std::size_t to_index = 0;
  std::vector<GeoPoint> shape_points;
  double length_m = 0.0;

  friend bool operator==(const RoadLink&, const RoadLink&) = default;
};

/// Directed primal road graph: nodes are intersections and dead ends, links
/// are street segments. Immutable once built.
class RoadGraph {
public:
  RoadGraph() = default;

  /// Validates referential integrity and fills in missing link lengths.
  /// Throws DataError on duplicate ids, dangling endpoints, self loops,
  /// invalid coordinates or non-positive lengths.
  static RoadGraph build(std::vector<RoadNode> nodes, std::vector<LinkSpec> links, CoordMode mode) {
    RoadGraph g;
    g.mode_ = mode;
    g.nodes_ = std::move(nodes);
    g.index_.reserve(g.nodes_.size());
    for (std::size_t i = 0; i < g.nodes_.size(); ++i) {
      const auto& n = g.nodes_[i];
      if (!is_valid(n.location, mode))
        throw DataError("node '" + n.id + "' has an invalid coordinate");
      if (!g.index_.emplace(n.id, i).second) throw DataError("duplicate node id '" + n.id + "'");
    }

    std::unordered_map<std::string, std::size_t> link_ids;
    g.links_.reserve(links.size());
    for (auto& spec : links) {
      if (!link_ids.emplace(spec.id, g.links_.size()).second)
        throw DataError("duplicate link id '" + spec.id + "'");
      const auto from = g.index_.find(spec.from);
      if (from == g.index_.end())
        throw DataError("link '" + spec.id + "' references missing node '" + spec.from + "'");
      const auto to = g.index_.find(spec.to);
      if (to == g.index_.end())
        throw DataError("link '" + spec.id + "' references missing node '" + spec.to + "'");
      if (from->second == to->second) throw DataError("link '" + spec.id + "' is a self loop");
      for (const auto& p : spec.shape_points)
        if (!is_valid(p, mode)) throw DataError("link '" + spec.id + "' has an invalid shape point");

      RoadLink link;
      link.id = std::move(spec.id);
      link.from = std::move(spec.from);
      link.to = std::move(spec.to);
      link.from_index = from->second;
      link.to_index = to->second;
      link.shape_points = std::move(spec.shape_points);
      if (spec.length_m) {
        if (!(*spec.length_m > 0.0) || !std::isfinite(*spec.length_m))
          throw DataError("link '" + link.id + "' has a non-positive length");
        link.length_m = *spec.length_m;
      } else {
        link.length_m = polyline_length_m(g.polyline(link), mode);
        if (!(link.length_m > 0.0))
          throw DataError("link '" + link.id + "' has zero computed length");
      }
      g.links_.push_back(std::move(link));
    }
    g.build_adjacency();
    return g;
  }

  CoordMode mode() const noexcept { return mode_; }
  const std::vector<RoadNode>& nodes() const noexcept { return nodes_; }
  const std::vector<RoadLink>& links() const noexcept { return links_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t link_count() const noexcept { return links_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  std::optional<std::size_t> find_node(const std::string& id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Indices into links() of the links leaving / entering node `i`.
  const std::vector<std::size_t>& out_links(std::size_t i) const { return out_[i]; }
  const std::vector<std::size_t>& in_links(std::size_t i) const { return in_[i]; }

  /// from location, shape points, to location.
  std::vector<GeoPoint> polyline(const RoadLink& link) const {
    std::vector<GeoPoint> pts;
    pts.reserve(link.shape_points.size() + 2);
    pts.push_back(nodes_[link.from_index].location);
    pts.insert(pts.end(), link.shape_points.begin(), link.shape_points.end());
    pts.push_back(nodes_[link.to_index].location);
    return pts;
  }

  /// Induced subgraph on the nodes with keep[i] set. Links survive only when
  /// both endpoints do. Node and link order is preserved.
  RoadGraph induced(const std::vector<bool>& keep) const {
    RoadGraph g;
    g.mode_ = mode_;
    std::vector<std::size_t> remap(nodes_.size(), 0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!keep[i]) continue;
      remap[i] = g.nodes_.size();
      g.index_.emplace(nodes_[i].id, g.nodes_.size());
      g.nodes_.push_back(nodes_[i]);
    }
    for (const auto& link : links_) {
      if (!keep[link.from_index] || !keep[link.to_index]) continue;
      RoadLink copy = link;
      copy.from_index = remap[link.from_index];
      copy.to_index = remap[link.to_index];
      g.links_.push_back(std::move(copy));
    }
    g.build_adjacency();
    return g;
  }

  friend bool operator==(const RoadGraph& a, const RoadGraph& b) {
    return a.mode_ == b.mode_ && a.nodes_ == b.nodes_ && a.links_ == b.links_;
  }

private:
  void build_adjacency() {
    out_.assign(nodes_.size(), {});
    in_.assign(nodes_.size(), {});
    for (std::size_t e = 0; e < links_.size(); ++e) {
      out_[links_[e].from_index].push_back(e);
      in_[links_[e].to_index].push_back(e);
    }
  }

  CoordMode mode_ = CoordMode::planar;
  std::vector<RoadNode> nodes_;
  std::vector<RoadLink> links_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
};

}  // namespace citymorph

#endif  // CITYMORPH_GRAPH_HPP
