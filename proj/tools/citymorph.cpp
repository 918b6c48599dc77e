#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "citymorph/citymorph.hpp"

namespace fs = std::filesystem;
using namespace citymorph;

namespace {

struct Options {
  RunConfig cfg;
  std::vector<std::string> modes;
  std::string k_range;
  std::string kind = "all";
  int count = 10;
  std::optional<int> size;
  bool detail = false;
  std::string config_file;
};

// --mode takes either a coordinate mode or a feature mode; it may be repeated.
void apply_modes(Options& o) {
  for (const auto& m : o.modes) {
    if (m == "baseline" || m == "enhanced") {
      o.cfg.feature_mode = parse_feature_mode(m);
    } else if (m == "geo" || m == "geographic" || m == "planar") {
      o.cfg.coord_mode = parse_coord_mode(m);
    } else {
      throw ValidationError("unknown --mode '" + m + "' (expected geo, planar, baseline or enhanced)");
    }
  }
}

std::pair<int, int> parse_k_range(const std::string& s) {
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      const int k = std::stoi(s);
      return {k, k};
    }
    return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
  } catch (const std::exception&) {
    throw ValidationError("--k-range expects a..b, got '" + s + "'");
  }
}

void report(const std::vector<fs::path>& written) {
  for (const auto& p : written) std::cout << "wrote " << p.string() << '\n';
}

void report_skipped(const RegionAnalysis& region) {
  for (const auto& name : region.skipped) std::cerr << "warning: city '" << name << "' has no nodes; skipped\n";
}

std::vector<CityMetrics> metrics_of(const RegionAnalysis& region) {
  std::vector<CityMetrics> out;
  for (const auto& c : region.cities) out.push_back(c.metrics);
  if (out.empty()) throw DataError("no city contains any node");
  return out;
}

int run_synth(const Options& o) {
  std::vector<Archetype> kinds;
  if (o.kind == "all") {
    kinds.assign(std::begin(kArchetypes), std::end(kArchetypes));
  } else {
    kinds.push_back(parse_archetype(o.kind));
  }
  const auto corpus = generate_corpus(kinds, o.count, o.cfg.seed, o.size);
  report(write_corpus(corpus, o.cfg.out_dir));
  return 0;
}

int run_ingest(const Options& o) {
  validate(o.cfg);
  const RoadGraph graph = load_graph(o.cfg.nodes_file, o.cfg.links_file, o.cfg.coord_mode);
  const auto boundaries = read_boundaries_geojson(o.cfg.boundaries_file);
  std::ostringstream out;
  out << "city,nodes,links,area_km2,status\n";
  for (const auto& b : boundaries) {
    try {
      const CityNetwork c = clip_to_city(graph, b);
      out << csv::escape(b.city_name) << ',' << c.graph.node_count() << ',' << c.graph.link_count() << ','
          << format_number(c.area_km2) << ",ok\n";
    } catch (const EmptyCityError&) {
      out << csv::escape(b.city_name) << ",0,0," << format_number(boundary_area_km2(b, o.cfg.coord_mode))
          << ",empty\n";
    }
  }
  ArtifactWriter w(o.cfg.out_dir);
  w.add("cities.csv", out.str());
  report(w.commit());
  return 0;
}

int run_metrics(const Options& o) {
  validate(o.cfg);
  const auto region = load_and_analyze(o.cfg);
  report_skipped(region);
  ArtifactWriter w(o.cfg.out_dir);
  w.add("metrics.csv", metrics_csv(region.cities));
  report(w.commit());
  return 0;
}

int run_patterns(const Options& o) {
  validate(o.cfg);
  const auto region = load_and_analyze(o.cfg);
  report_skipped(region);
  ArtifactWriter w(o.cfg.out_dir);
  w.add("patterns.csv", patterns_csv(region.cities));
  w.add("bearing_histograms.json", bearing_histograms_json(region.cities));
  if (o.detail) w.add("pattern_nodes.csv", pattern_nodes_csv(region.cities));
  report(w.commit());
  return 0;
}

int run_features(const Options& o) {
  validate(o.cfg);
  const auto region = load_and_analyze(o.cfg);
  report_skipped(region);
  const FeatureMatrix raw = corpus_features(metrics_of(region), o.cfg.feature_mode, o.cfg);
  const auto corr = pearson_report(raw, o.cfg.corr_threshold);
  ArtifactWriter w(o.cfg.out_dir);
  w.add("features.csv", features_csv(raw));
  w.add("correlations.csv", correlations_csv(corr));
  w.add("correlated_pairs.csv", correlated_pairs_csv(corr));
  report(w.commit());
  return 0;
}

int run_cluster(const Options& o) {
  validate(o.cfg);
  const auto region = load_and_analyze(o.cfg);
  report_skipped(region);
  const auto metrics = metrics_of(region);
  const CorpusModel baseline = model_corpus(metrics, FeatureMode::baseline, o.cfg);
  const CorpusModel enhanced = model_corpus(metrics, FeatureMode::enhanced, o.cfg);
  const CorpusModel& sel = o.cfg.feature_mode == FeatureMode::baseline ? baseline : enhanced;
  ArtifactWriter w(o.cfg.out_dir);
  w.add("factors.json", factors_json(sel.factors));
  w.add("clusters.csv", clusters_csv(sel.raw.cities, sel.clusters));
  w.add("evaluation.json", evaluation_json({&baseline, &enhanced}, o.cfg));
  w.add("elbow.csv", elbow_csv(sel.elbow));
  report(w.commit());
  return 0;
}

int run_pipeline_cmd(Options o, bool out_given) {
  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    if (!in) throw ValidationError("cannot open config '" + o.config_file + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("config '" + o.config_file + "' is not valid JSON: " + e.what());
    }
    // A run manifest carries the config under "config".
    const fs::path out = o.cfg.out_dir;
    const unsigned threads = o.cfg.threads;
    o.cfg = config_from_json(j.contains("config") ? j["config"] : j);
    o.cfg.threads = threads;
    if (out_given) o.cfg.out_dir = out;
  }
  const auto res = run_pipeline(o.cfg);
  report_skipped(res.region);
  const auto& sel = res.selected(o.cfg.feature_mode);
  for (const auto* m : {&res.baseline, &res.enhanced})
    std::cerr << to_string(m->mode) << ": features=" << m->raw.cols() << " factors=" << m->factors.retained
              << " silhouette=" << (m->silhouette ? format_number(*m->silhouette) : "n/a")
              << " dbi=" << (m->davies_bouldin ? format_number(m->davies_bouldin->value) : "n/a") << '\n';
  for (const auto& w : sel.factors.warnings) std::cerr << "warning: " << w << '\n';
  report(res.artifacts);
  return 0;
}

void add_inputs(CLI::App* cmd, Options& o) {
  cmd->add_option("--nodes", o.cfg.nodes_file, "Nodes CSV (node_id,x,y)");
  cmd->add_option("--links", o.cfg.links_file, "Links CSV (link_id,from,to,length_m,shape_points)");
  cmd->add_option("--boundaries", o.cfg.boundaries_file, "City boundaries GeoJSON");
}

void add_model_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--k", o.cfg.k, "Number of clusters")->capture_default_str();
  cmd->add_option("--k-range", o.k_range, "Elbow range a..b (default 1..min(10, cities))");
  cmd->add_option("--restarts", o.cfg.restarts, "k-means++ restarts")->capture_default_str();
  cmd->add_option("--factors", o.cfg.factors, "Override the number of retained factors");
}

void add_feature_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--drop-features", o.cfg.drop_features, "Feature columns to exclude")->delimiter(',');
  cmd->add_option("--corr-threshold", o.cfg.corr_threshold, "Report feature pairs with |r| at or above this")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  o.cfg.out_dir = ".";
  CLI::App app{"Road network morphology: metrics, intersection patterns, bearings, typology clustering"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kToolVersion);

  app.add_option("--mode", o.modes, "geo | planar (coordinates), baseline | enhanced (feature set); repeatable")
      ->allow_extra_args(false);
  app.add_option("--tau", o.cfg.tau, "Angle tolerance in degrees")->capture_default_str();
  app.add_option("--seed", o.cfg.seed, "Random seed")->capture_default_str();
  app.add_option("--out", o.cfg.out_dir, "Output directory")->capture_default_str();
  app.add_option("--dominant-threshold", o.cfg.dominant_threshold, "Bearing bin share counted as dominant")
      ->capture_default_str();
  app.add_option("--threads", o.cfg.threads, "Worker threads (0 = all cores)");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus of archetype cities (planar)");
  synth->add_option("--kind", o.kind, "gridded | orthogonal | organic | all")->capture_default_str();
  synth->add_option("--count", o.count, "Cities per archetype")->capture_default_str();
  synth->add_option("--size", o.size, "Node-count target per city (default: sampled 64..144)");

  auto* ingest = app.add_subcommand("ingest", "Load and clip the network; report node and link counts per city");
  add_inputs(ingest, o);

  auto* metrics = app.add_subcommand("metrics", "Degree, betweenness and geometric summaries per city");
  add_inputs(metrics, o);

  auto* patterns = app.add_subcommand("patterns", "Intersection patterns and bearing histograms per city");
  add_inputs(patterns, o);
  patterns->add_flag("--detail", o.detail, "Also write per-node angles and types");

  auto* features = app.add_subcommand("features", "Feature matrix and Pearson correlations");
  add_inputs(features, o);
  add_feature_options(features, o);

  auto* cluster = app.add_subcommand("cluster", "Factor extraction, k-means, evaluation indices, elbow curve");
  add_inputs(cluster, o);
  add_feature_options(cluster, o);
  add_model_options(cluster, o);

  auto* pipeline = app.add_subcommand("pipeline", "Run every stage and write all artifacts plus a manifest");
  add_inputs(pipeline, o);
  add_feature_options(pipeline, o);
  add_model_options(pipeline, o);
  pipeline->add_option("--config", o.config_file, "Re-run from a manifest.json (or bare config JSON)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code(ErrorKind::validation);
  }

  try {
    apply_modes(o);
    if (!o.k_range.empty()) o.cfg.k_range = parse_k_range(o.k_range);
    validate(o.cfg, false);
    if (*synth) return run_synth(o);
    if (*ingest) return run_ingest(o);
    if (*metrics) return run_metrics(o);
    if (*patterns) return run_patterns(o);
    if (*features) return run_features(o);
    if (*cluster) return run_cluster(o);
    return run_pipeline_cmd(o, app.get_option("--out")->count() > 0);
  } catch (const Error& e) {
    std::cerr << "citymorph: error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "citymorph: internal error: " << e.what() << '\n';
    return exit_code(ErrorKind::internal);
  }
}
