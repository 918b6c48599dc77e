#ifndef CITYMORPH_PIPELINE_HPP
#define CITYMORPH_PIPELINE_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "citymorph/bearings.hpp"
#include "citymorph/clustering.hpp"
#include "citymorph/error.hpp"
#include "citymorph/features.hpp"
#include "citymorph/geometry.hpp"
#include "citymorph/io.hpp"
#include "citymorph/parallel.hpp"
#include "citymorph/polygon.hpp"
#include "citymorph/reduction.hpp"
#include "citymorph/synth.hpp"
#include "citymorph/topology.hpp"

namespace citymorph {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunConfig {
  CoordMode coord_mode = CoordMode::geographic;
  FeatureMode feature_mode = FeatureMode::enhanced;
  double tau = kDefaultAngleTolerance;
  int k = 3;
  std::optional<std::pair<int, int>> k_range;  // elbow range; default 1..min(10, cities)
  std::uint64_t seed = 42;
  int restarts = 10;
  double dominant_threshold = kDefaultDominantThreshold;
  double corr_threshold = 0.9;
  std::optional<int> factors;
  std::vector<std::string> drop_features;
  std::filesystem::path nodes_file;
  std::filesystem::path links_file;
  std::filesystem::path boundaries_file;
  std::filesystem::path out_dir = ".";
  unsigned threads = 0;  // 0 = hardware concurrency; not part of the manifest
};

/// Checks ranges and input paths; throws ValidationError.
inline void validate(const RunConfig& c, bool need_inputs = true) {
  if (!(c.tau > 0.0 && c.tau < 45.0)) throw ValidationError("tau must be in (0, 45), got " + format_number(c.tau));
  if (!(c.dominant_threshold > 0.0 && c.dominant_threshold < 1.0))
    throw ValidationError("dominant threshold must be in (0, 1)");
  if (c.k < 1) throw ValidationError("k must be >= 1");
  if (c.restarts < 1) throw ValidationError("restarts must be >= 1");
  if (c.k_range && (c.k_range->first < 1 || c.k_range->second < c.k_range->first))
    throw ValidationError("invalid k range");
  if (c.factors && *c.factors < 1) throw ValidationError("--factors must be >= 1");
  if (!(c.corr_threshold >= 0.0 && c.corr_threshold <= 1.0))
    throw ValidationError("correlation threshold must be in [0, 1]");
  if (need_inputs) {
    for (const auto* p : {&c.nodes_file, &c.links_file, &c.boundaries_file})
      if (p->empty() || !std::filesystem::exists(*p))
        throw ValidationError("input file '" + p->string() + "' does not exist");
  }
}

inline nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["mode"] = to_string(c.coord_mode);
  j["feature_mode"] = to_string(c.feature_mode);
  j["tau"] = c.tau;
  j["k"] = c.k;
  j["k_range"] = c.k_range ? nlohmann::json::array({c.k_range->first, c.k_range->second}) : nlohmann::json();
  j["seed"] = c.seed;
  j["restarts"] = c.restarts;
  j["dominant_threshold"] = c.dominant_threshold;
  j["corr_threshold"] = c.corr_threshold;
  j["factors"] = c.factors ? nlohmann::json(*c.factors) : nlohmann::json();
  j["drop_features"] = c.drop_features;
  j["nodes"] = c.nodes_file.string();
  j["links"] = c.links_file.string();
  j["boundaries"] = c.boundaries_file.string();
  j["out"] = c.out_dir.string();
  return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  try {
    RunConfig c;
    c.coord_mode = parse_coord_mode(j.at("mode").get<std::string>());
    c.feature_mode = parse_feature_mode(j.at("feature_mode").get<std::string>());
    c.tau = j.at("tau").get<double>();
    c.k = j.at("k").get<int>();
    if (!j.at("k_range").is_null()) c.k_range = std::pair{j["k_range"][0].get<int>(), j["k_range"][1].get<int>()};
    c.seed = j.at("seed").get<std::uint64_t>();
    c.restarts = j.at("restarts").get<int>();
    c.dominant_threshold = j.at("dominant_threshold").get<double>();
    c.corr_threshold = j.at("corr_threshold").get<double>();
    if (!j.at("factors").is_null()) c.factors = j["factors"].get<int>();
    c.drop_features = j.at("drop_features").get<std::vector<std::string>>();
    c.nodes_file = j.at("nodes").get<std::string>();
    c.links_file = j.at("links").get<std::string>();
    c.boundaries_file = j.at("boundaries").get<std::string>();
    c.out_dir = j.at("out").get<std::string>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad run configuration: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Per-city stage

struct CityReport {
  std::string city;
  std::size_t nodes = 0;
  std::size_t links = 0;
  double area_km2 = 0.0;
  CityMetrics metrics;
  std::vector<NodePattern> node_patterns;
};

inline CityReport analyze_city(const CityNetwork& city, double tau, double dominant_threshold, unsigned threads = 1) {
  CityReport r;
  r.city = city.city_name;
  r.nodes = city.graph.node_count();
  r.links = city.graph.link_count();
  r.area_km2 = city.area_km2;
  r.metrics.city = city.city_name;
  r.metrics.topo = topo_metrics(city, threads);
  r.node_patterns = node_patterns(city, tau);
  r.metrics.patterns = pattern_counts(r.node_patterns);
  r.metrics.bearings = bearing_histogram(city, dominant_threshold);
  return r;
}

struct RegionAnalysis {
  std::vector<CityReport> cities;      // in boundary order, empty cities removed
  std::vector<std::string> skipped;    // empty cities
};

/// Clips every boundary and analyzes the non-empty cities in parallel.
inline RegionAnalysis analyze_region(const RoadGraph& graph, const std::vector<CityBoundary>& boundaries,
                                     const RunConfig& config) {
  std::vector<std::optional<CityReport>> slots(boundaries.size());
  parallel_for(
      boundaries.size(),
      [&](std::size_t i) {
        try {
          const CityNetwork city = clip_to_city(graph, boundaries[i]);
          slots[i] = analyze_city(city, config.tau, config.dominant_threshold,
                                  boundaries.size() == 1 ? config.threads : 1);
        } catch (const EmptyCityError&) {
          slots[i].reset();
        }
      },
      config.threads);
  RegionAnalysis out;
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    if (slots[i]) {
      out.cities.push_back(std::move(*slots[i]));
    } else {
      out.skipped.push_back(boundaries[i].city_name);
    }
  }
  return out;
}

inline RegionAnalysis load_and_analyze(const RunConfig& config) {
  const RoadGraph graph = load_graph(config.nodes_file, config.links_file, config.coord_mode);
  const auto boundaries = read_boundaries_geojson(config.boundaries_file);
  if (boundaries.empty()) throw DataError("boundaries file contains no cities");
  return analyze_region(graph, boundaries, config);
}

// ---------------------------------------------------------------------------
// Corpus stage

struct CorpusModel {
  FeatureMode mode = FeatureMode::enhanced;
  FeatureMatrix raw;
  FeatureMatrix normalized;
  CorrelationReport correlations;
  FactorModel factors;
  ClusteringResult clusters;
  std::optional<double> silhouette;
  std::optional<DaviesBouldin> davies_bouldin;
  ElbowCurve elbow;
};

/// Raw feature matrix for one mode with config.drop_features removed.
inline FeatureMatrix corpus_features(const std::vector<CityMetrics>& metrics, FeatureMode mode,
                                     const RunConfig& config) {
  FeatureMatrix raw = assemble_features(metrics, mode);
  if (config.drop_features.empty()) return raw;
  // Names valid only for the enhanced set are ignored in baseline mode.
  const auto known = feature_names(FeatureMode::enhanced);
  std::vector<std::string> present;
  for (const auto& name : config.drop_features) {
    if (std::find(known.begin(), known.end(), name) == known.end())
      throw ValidationError("unknown feature '" + name + "'");
    if (raw.column(name)) present.push_back(name);
  }
  return drop_features(raw, present);
}

inline CorpusModel model_corpus(const std::vector<CityMetrics>& metrics, FeatureMode mode, const RunConfig& config) {
  CorpusModel m;
  m.mode = mode;
  m.raw = corpus_features(metrics, mode, config);
  if (m.raw.rows() < 3) throw DataError("clustering needs at least 3 non-empty cities, got " + std::to_string(m.raw.rows()));
  m.correlations = pearson_report(m.raw, config.corr_threshold);
  m.normalized = zscore(m.raw);
  m.factors = extract_factors(m.normalized, config.factors);
  m.clusters = kmeans(m.factors.scores, config.k, config.seed, config.restarts);
  if (config.k >= 2) {
    m.silhouette = silhouette(m.factors.scores, m.clusters.labels);
    m.davies_bouldin = davies_bouldin(m.factors.scores, m.clusters.labels);
  }
  const int rows = static_cast<int>(m.raw.rows());
  const auto range = config.k_range.value_or(std::pair{1, std::min(10, rows)});
  if (range.second > rows)
    throw ValidationError("k range upper bound " + std::to_string(range.second) + " exceeds city count " +
                          std::to_string(rows));
  m.elbow = elbow(m.factors.scores, range.first, range.second, config.seed, config.restarts);
  return m;
}

// ---------------------------------------------------------------------------
// Artifact writers. Every writer is deterministic for identical inputs.

inline std::string metrics_csv(const std::vector<CityReport>& cities) {
  std::ostringstream out;
  out << "city,prop_deg1,prop_deg2,prop_deg3,prop_deg4,prop_deg5plus,median_bc,link_node_ratio,"
         "density_km_per_km2,mean_link_length_m,pct_in_ne_out\n";
  for (const auto& c : cities) {
    const auto& t = *c.metrics.topo;
    out << csv::escape(c.city);
    for (std::size_t d = 1; d <= 5; ++d) out << ',' << format_number(t.degree_profile.proportions_out[d]);
    out << ',' << format_number(t.centrality.median_normalized_bc) << ',' << format_number(t.link_node_ratio) << ','
        << format_number(t.network_density) << ',' << format_number(t.mean_link_length) << ','
        << format_number(t.degree_profile.pct_nodes_in_ne_out) << '\n';
  }
  return out.str();
}

inline std::string patterns_csv(const std::vector<CityReport>& cities) {
  std::ostringstream out;
  out << "city";
  for (int d : {3, 4}) {
    for (int t = 1; t <= kPatternTypes; ++t) out << ",d" << d << "_t" << t;
    out << ",d" << d << "_other";
  }
  out << '\n';
  for (const auto& c : cities) {
    const auto& p = *c.metrics.patterns;
    out << csv::escape(c.city);
    for (const auto* props : {&p.d3, &p.d4}) {
      for (int t = 1; t <= kPatternTypes; ++t) out << ',' << format_number((*props)[static_cast<std::size_t>(t)]);
      out << ',' << format_number((*props)[kPatternOther]);
    }
    out << '\n';
  }
  return out.str();
}

inline std::string pattern_nodes_csv(const std::vector<CityReport>& cities) {
  std::ostringstream out;
  out << "city,node_id,degree,angles,type\n";
  for (const auto& c : cities)
    for (const auto& n : c.node_patterns) {
      std::string angles;
      for (double a : n.angles) angles += (angles.empty() ? "" : ";") + format_number(a);
      out << csv::escape(c.city) << ',' << csv::escape(n.node_id) << ',' << n.degree << ',' << angles << ','
          << (n.type == kPatternOther ? std::string("other") : std::to_string(n.type)) << '\n';
    }
  return out.str();
}

inline std::string features_csv(const FeatureMatrix& m) {
  std::ostringstream out;
  out << "city";
  for (const auto& f : m.feature_names) out << ',' << f;
  out << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out << csv::escape(m.cities[static_cast<std::size_t>(r)]);
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << format_number(m.values(r, j));
    out << '\n';
  }
  return out.str();
}

inline std::string correlations_csv(const CorrelationReport& rep) {
  std::ostringstream out;
  out << "feature";
  for (const auto& f : rep.feature_names) out << ',' << f;
  out << '\n';
  for (Eigen::Index i = 0; i < rep.matrix.rows(); ++i) {
    out << rep.feature_names[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < rep.matrix.cols(); ++j) out << ',' << format_number(rep.matrix(i, j));
    out << '\n';
  }
  return out.str();
}

inline std::string correlated_pairs_csv(const CorrelationReport& rep) {
  std::ostringstream out;
  out << "feature_a,feature_b,r\n";
  for (const auto& p : rep.flagged_pairs) out << p.a << ',' << p.b << ',' << format_number(p.r) << '\n';
  return out.str();
}

inline nlohmann::json factors_json(const FactorModel& fm) {
  nlohmann::json loadings = nlohmann::json::object();
  for (Eigen::Index i = 0; i < fm.loadings.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(fm.loadings.cols()));
    for (Eigen::Index k = 0; k < fm.loadings.cols(); ++k) row[static_cast<std::size_t>(k)] = fm.loadings(i, k);
    loadings[fm.feature_names[static_cast<std::size_t>(i)]] = row;
  }
  std::vector<double> explained;
  double total = 0.0;
  for (double v : fm.eigenvalues) total += v;
  for (double v : fm.eigenvalues) explained.push_back(total > 0 ? v / total : 0.0);
  return {{"method", "principal components of the correlation matrix, unrotated"},
          {"retention", "eigenvalue > 1"},
          {"eigenvalues", fm.eigenvalues},
          {"explained_variance_ratio", explained},
          {"retained", fm.retained},
          {"features", fm.feature_names},
          {"excluded_constant_features", fm.excluded_features},
          {"rank_deficient", fm.rank_deficient},
          {"warnings", fm.warnings},
          {"loadings", loadings}};
}

inline std::string clusters_csv(const std::vector<std::string>& cities, const ClusteringResult& r) {
  std::ostringstream out;
  out << "city,label\n";
  for (std::size_t i = 0; i < cities.size(); ++i) out << csv::escape(cities[i]) << ',' << r.labels[i] << '\n';
  return out.str();
}

inline std::string elbow_csv(const ElbowCurve& curve) {
  std::ostringstream out;
  out << "k,inertia\n";
  for (const auto& e : curve) out << e.k << ',' << format_number(e.inertia) << '\n';
  return out.str();
}

inline nlohmann::json evaluation_entry(const CorpusModel& m) {
  nlohmann::json j;
  j["k"] = m.clusters.k;
  j["inertia"] = m.clusters.inertia;
  j["silhouette"] = m.silhouette ? nlohmann::json(*m.silhouette) : nlohmann::json();
  j["davies_bouldin"] = m.davies_bouldin ? nlohmann::json(m.davies_bouldin->value) : nlohmann::json();
  j["davies_bouldin_coincident_centroids"] = m.davies_bouldin && m.davies_bouldin->coincident_centroids;
  j["features"] = m.raw.cols();
  j["retained_factors"] = m.factors.retained;
  j["lloyd_iterations"] = m.clusters.iterations;
  return j;
}

inline nlohmann::json evaluation_json(const std::vector<const CorpusModel*>& models, const RunConfig& config) {
  nlohmann::json modes = nlohmann::json::object();
  for (const auto* m : models) modes[std::string(to_string(m->mode))] = evaluation_entry(*m);
  return {{"space", "factor_scores"},
          {"distance", "euclidean"},
          {"selected_mode", to_string(config.feature_mode)},
          {"seed", config.seed},
          {"restarts", config.restarts},
          {"modes", modes}};
}

inline nlohmann::json bearing_histograms_json(const std::vector<CityReport>& cities) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : cities) {
    const auto& h = *c.metrics.bearings;
    std::vector<double> centers;
    for (std::size_t k = 0; k < kBearingBins; ++k) centers.push_back(kBearingBinWidth * (static_cast<double>(k) + 0.5));
    out.push_back({{"city", c.city},
                   {"bin_width_deg", kBearingBinWidth},
                   {"bin_centers_deg", centers},
                   {"proportions", h.raw},
                   {"aligned_proportions", h.bins},
                   {"rotation_offset", h.rotation_offset},
                   {"dominant_bin_count", h.dominant_bin_count},
                   {"links", h.link_count}});
  }
  return out;
}

/// Writes a set of named files into a directory. If any write fails every
/// file written so far is removed.
class ArtifactWriter {
public:
  explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void add(std::string name, std::string content) { files_.emplace_back(std::move(name), std::move(content)); }
  void add(std::string name, const nlohmann::json& j) { add(std::move(name), j.dump(2) + "\n"); }

  std::vector<std::filesystem::path> commit() {
    std::vector<std::filesystem::path> written;
    try {
      std::filesystem::create_directories(dir_);
      for (const auto& [name, content] : files_) {
        const auto path = dir_ / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DataError("cannot write '" + path.string() + "'");
        written.push_back(path);
        out << content;
        if (!out) throw DataError("failed writing '" + path.string() + "'");
      }
    } catch (...) {
      std::error_code ec;
      for (const auto& p : written) std::filesystem::remove(p, ec);
      throw;
    }
    return written;
  }

private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

struct PipelineResult {
  RegionAnalysis region;
  CorpusModel baseline;
  CorpusModel enhanced;
  std::vector<std::filesystem::path> artifacts;

  const CorpusModel& selected(FeatureMode m) const { return m == FeatureMode::baseline ? baseline : enhanced; }
};

inline nlohmann::json manifest_json(const RunConfig& config, const RegionAnalysis& region,
                                    const std::vector<std::string>& artifacts) {
  return {{"tool", "citymorph"},
          {"version", kToolVersion},
          {"config", config_to_json(config)},
          {"cities", region.cities.size()},
          {"skipped_empty_cities", region.skipped},
          {"artifacts", artifacts}};
}

/// End-to-end run: clip, per-city metrics, both feature sets, factors,
/// k-means, evaluation, elbow; writes all artifacts into config.out_dir.
inline PipelineResult run_pipeline(const RunConfig& config) {
  validate(config);
  PipelineResult res;
  res.region = load_and_analyze(config);
  std::vector<CityMetrics> metrics;
  for (const auto& c : res.region.cities) metrics.push_back(c.metrics);
  if (metrics.empty()) throw DataError("no city contains any node");
  res.baseline = model_corpus(metrics, FeatureMode::baseline, config);
  res.enhanced = model_corpus(metrics, FeatureMode::enhanced, config);
  const CorpusModel& sel = res.selected(config.feature_mode);

  ArtifactWriter w(config.out_dir);
  w.add("metrics.csv", metrics_csv(res.region.cities));
  w.add("patterns.csv", patterns_csv(res.region.cities));
  w.add("features.csv", features_csv(sel.raw));
  w.add("correlations.csv", correlations_csv(sel.correlations));
  w.add("correlated_pairs.csv", correlated_pairs_csv(sel.correlations));
  w.add("factors.json", factors_json(sel.factors));
  w.add("clusters.csv", clusters_csv(sel.raw.cities, sel.clusters));
  w.add("evaluation.json", evaluation_json({&res.baseline, &res.enhanced}, config));
  w.add("elbow.csv", elbow_csv(sel.elbow));
  w.add("bearing_histograms.json", bearing_histograms_json(res.region.cities));
  std::vector<std::string> names = {"metrics.csv",  "patterns.csv",    "features.csv", "correlations.csv",
                                    "correlated_pairs.csv", "factors.json", "clusters.csv", "evaluation.json",
                                    "elbow.csv",    "bearing_histograms.json"};
  w.add("manifest.json", manifest_json(config, res.region, names));
  res.artifacts = w.commit();
  return res;
}

/// Writes a synthetic corpus as one regional network: nodes.csv, links.csv,
/// boundaries.geojson, plus labels.csv with the generating archetype.
inline std::vector<std::filesystem::path> write_corpus(const std::vector<SyntheticCity>& corpus,
                                                       const std::filesystem::path& dir) {
  std::ostringstream nodes, links, labels;
  nodes << "node_id,x,y\n";
  links << "link_id,from,to,length_m,shape_points\n";
  labels << "city,kind\n";
  std::vector<CityBoundary> boundaries;
  for (const auto& c : corpus) {
    std::ostringstream n, l;
    write_nodes_csv(n, c.city.graph.nodes());
    write_links_csv(l, c.city.graph.links());
    // drop the per-city header lines
    nodes << n.str().substr(n.str().find('\n') + 1);
    links << l.str().substr(l.str().find('\n') + 1);
    labels << csv::escape(c.city.city_name) << ',' << to_string(c.kind) << '\n';
    boundaries.push_back(c.boundary);
  }
  ArtifactWriter w(dir);
  w.add("nodes.csv", nodes.str());
  w.add("links.csv", links.str());
  w.add("boundaries.geojson", boundaries_to_geojson(boundaries));
  w.add("labels.csv", labels.str());
  return w.commit();
}

}  // namespace citymorph

#endif  // CITYMORPH_PIPELINE_HPP
