#ifndef CITYMORPH_IO_HPP
#define CITYMORPH_IO_HPP

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "citymorph/error.hpp"
#include "citymorph/geo.hpp"
#include "citymorph/graph.hpp"
#include "citymorph/polygon.hpp"

namespace citymorph {

/// Shortest decimal text that round-trips the double. Deterministic across
/// runs, which the artifact files rely on.
inline std::string format_number(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace csv {

/// Splits one CSV record. Supports double-quoted fields with "" escapes.
inline std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  out.push_back(std::move(field));
  return out;
}

inline std::string escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view text, const std::string& where) {
  text = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v))
    throw DataError(where + ": bad number '" + std::string(text) + "'");
  return v;
}

// Reads the file, checks the header, returns data records with line numbers.
struct Record {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

inline std::vector<Record> read_table(const std::filesystem::path& path, const std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::string line;
  std::size_t lineno = 0;
  std::vector<Record> rows;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_record(line);
    if (!have_header) {
      if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
        fields.front().erase(0, 3);
      for (auto& f : fields) f = std::string(trim(f));
      if (fields != header) {
        std::string expected;
        for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
        throw DataError(path.string() + ": expected header '" + expected + "'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != header.size())
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    rows.push_back({lineno, std::move(fields)});
  }
  if (!have_header) throw DataError(path.string() + ": missing header");
  return rows;
}

}  // namespace csv

/// Parses "x y;x y;..." (empty allowed).
inline std::vector<GeoPoint> parse_shape_points(std::string_view text, const std::string& where) {
  std::vector<GeoPoint> pts;
  text = csv::trim(text);
  while (!text.empty()) {
    const auto semi = text.find(';');
    std::string_view pair = csv::trim(text.substr(0, semi));
    text = semi == std::string_view::npos ? std::string_view{} : text.substr(semi + 1);
    if (pair.empty()) continue;
    const auto space = pair.find_first_of(" \t");
    if (space == std::string_view::npos) throw DataError(where + ": shape point '" + std::string(pair) + "' needs 'x y'");
    pts.push_back({csv::parse_double(pair.substr(0, space), where),
                   csv::parse_double(pair.substr(space + 1), where)});
  }
  return pts;
}

inline std::string format_shape_points(const std::vector<GeoPoint>& pts) {
  std::string out;
  for (const auto& p : pts) {
    if (!out.empty()) out.push_back(';');
    out += format_number(p.x) + " " + format_number(p.y);
  }
  return out;
}

inline std::vector<RoadNode> read_nodes_csv(const std::filesystem::path& path) {
  std::vector<RoadNode> nodes;
  for (auto& rec : csv::read_table(path, {"node_id", "x", "y"})) {
    const std::string where = path.string() + ":" + std::to_string(rec.line);
    const std::string id(csv::trim(rec.fields[0]));
    if (id.empty()) throw DataError(where + ": empty node id");
    nodes.push_back({id, {csv::parse_double(rec.fields[1], where), csv::parse_double(rec.fields[2], where)}});
  }
  return nodes;
}

inline std::vector<LinkSpec> read_links_csv(const std::filesystem::path& path) {
  std::vector<LinkSpec> links;
  for (auto& rec : csv::read_table(path, {"link_id", "from", "to", "length_m", "shape_points"})) {
    const std::string where = path.string() + ":" + std::to_string(rec.line);
    LinkSpec link;
    link.id = std::string(csv::trim(rec.fields[0]));
    link.from = std::string(csv::trim(rec.fields[1]));
    link.to = std::string(csv::trim(rec.fields[2]));
    if (link.id.empty()) throw DataError(where + ": empty link id");
    if (!csv::trim(rec.fields[3]).empty()) link.length_m = csv::parse_double(rec.fields[3], where);
    link.shape_points = parse_shape_points(rec.fields[4], where);
    links.push_back(std::move(link));
  }
  return links;
}

inline RoadGraph load_graph(const std::filesystem::path& nodes_file, const std::filesystem::path& links_file,
                            CoordMode mode) {
  return RoadGraph::build(read_nodes_csv(nodes_file), read_links_csv(links_file), mode);
}

namespace detail {

inline Ring ring_from_json(const nlohmann::json& coords, const std::string& city) {
  Ring ring;
  if (!coords.is_array()) throw DataError("boundary '" + city + "': ring is not an array");
  for (const auto& pos : coords) {
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number())
      throw DataError("boundary '" + city + "': bad position");
    ring.push_back({pos[0].get<double>(), pos[1].get<double>()});
  }
  return ring;
}

inline Polygon polygon_from_json(const nlohmann::json& coords, const std::string& city) {
  Polygon poly;
  if (!coords.is_array()) throw DataError("boundary '" + city + "': polygon is not an array");
  for (const auto& ring : coords) poly.rings.push_back(ring_from_json(ring, city));
  return poly;
}

}  // namespace detail

/// GeoJSON FeatureCollection of Polygon / MultiPolygon features, each with a
/// string `name` property.
inline std::vector<CityBoundary> read_boundaries_geojson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (doc.value("type", "") != "FeatureCollection" || !doc.contains("features") || !doc["features"].is_array())
    throw DataError(path.string() + ": expected a GeoJSON FeatureCollection");

  std::vector<CityBoundary> out;
  try {
    for (const auto& feature : doc["features"]) {
      const auto props = feature.value("properties", nlohmann::json::object());
      if (!props.is_object() || !props.contains("name") || !props["name"].is_string())
        throw DataError(path.string() + ": feature without a string 'name' property");
      const std::string name = props["name"].get<std::string>();
      const auto& geom = feature.at("geometry");
      const std::string type = geom.value("type", "");
      std::vector<Polygon> polys;
      if (type == "Polygon") {
        polys.push_back(detail::polygon_from_json(geom.at("coordinates"), name));
      } else if (type == "MultiPolygon") {
        for (const auto& p : geom.at("coordinates")) polys.push_back(detail::polygon_from_json(p, name));
      } else {
        throw DataError(path.string() + ": feature '" + name + "' has unsupported geometry '" + type + "'");
      }
      out.push_back(make_boundary(name, std::move(polys)));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return out;
}

inline void write_nodes_csv(std::ostream& out, const std::vector<RoadNode>& nodes) {
  out << "node_id,x,y\n";
  for (const auto& n : nodes)
    out << csv::escape(n.id) << ',' << format_number(n.location.x) << ',' << format_number(n.location.y) << '\n';
}

inline void write_links_csv(std::ostream& out, const std::vector<RoadLink>& links) {
  out << "link_id,from,to,length_m,shape_points\n";
  for (const auto& l : links)
    out << csv::escape(l.id) << ',' << csv::escape(l.from) << ',' << csv::escape(l.to) << ','
        << format_number(l.length_m) << ',' << format_shape_points(l.shape_points) << '\n';
}

inline nlohmann::json boundaries_to_geojson(const std::vector<CityBoundary>& boundaries) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& b : boundaries) {
    nlohmann::json polys = nlohmann::json::array();
    for (const auto& poly : b.polygons) {
      nlohmann::json rings = nlohmann::json::array();
      for (const auto& ring : poly.rings) {
        nlohmann::json coords = nlohmann::json::array();
        for (const auto& p : ring) coords.push_back({p.x, p.y});
        coords.push_back({ring.front().x, ring.front().y});  // GeoJSON rings are closed
        rings.push_back(std::move(coords));
      }
      polys.push_back(std::move(rings));
    }
    nlohmann::json geometry;
    if (polys.size() == 1) {
      geometry = {{"type", "Polygon"}, {"coordinates", polys[0]}};
    } else {
      geometry = {{"type", "MultiPolygon"}, {"coordinates", polys}};
    }
    features.push_back({{"type", "Feature"}, {"properties", {{"name", b.city_name}}}, {"geometry", geometry}});
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

}  // namespace citymorph

#endif  // CITYMORPH_IO_HPP
