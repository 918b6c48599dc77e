#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "oracles.hpp"

using namespace citymorph;
using namespace testing_util;

TEST(Haversine, EquatorThousandthDegreeMatchesEllipsoid) {
  const auto g = make_graph({{"A", 0, 0}, {"B", 0.001, 0}}, {{"ab", "A", "B"}}, CoordMode::geographic);
  ASSERT_EQ(g.node_count(), 2u);
  ASSERT_EQ(g.link_count(), 1u);
  const double expected = oracle::vincenty_m({0, 0}, {0.001, 0});
  EXPECT_NEAR(expected, 111.319, 1e-3);
  EXPECT_NEAR(g.links()[0].length_m, expected, 1e-6);
}

TEST(Haversine, AgreesWithChordFormulaOnRandomPairs) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lon(-180, 180), lat(-85, 85), step(-0.05, 0.05);
  for (int i = 0; i < 500; ++i) {
    const GeoPoint a{lon(rng), lat(rng)};
    const GeoPoint b{a.x + step(rng), std::clamp(a.y + step(rng), -89.0, 89.0)};
    const double ref = oracle::chord_sphere_m(a, b);
    EXPECT_NEAR(haversine_m(a, b), ref, 1e-9 * std::max(1.0, ref));
  }
}

TEST(RoadGraph, EmptyLinksKeepsNodes) {
  const auto g = make_graph({{"A", 0, 0}, {"B", 1, 1}, {"C", 2, 2}}, {});
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.link_count(), 0u);
}

TEST(RoadGraph, DanglingEndpointNamesMissingNode) {
  try {
    make_graph({{"A", 0, 0}}, {{"l", "A", "Z"}});
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("'Z'"), std::string::npos) << e.what();
  }
}

TEST(RoadGraph, RejectsBadInput) {
  EXPECT_THROW(make_graph({{"A", 0, 0}, {"A", 1, 0}}, {}), DataError);
  EXPECT_THROW(make_graph({{"A", 0, 0}, {"B", 1, 0}}, {{"l", "A", "B"}, {"l", "B", "A"}}), DataError);
  EXPECT_THROW(make_graph({{"A", 0, 0}, {"B", 1, 0}}, {{"l", "A", "A"}}), DataError);
  EXPECT_THROW(make_graph({{"A", 0, 0}, {"B", 0, 0}}, {{"l", "A", "B"}}), DataError);
  EXPECT_THROW(make_graph({{"A", 0, 0}, {"B", 1, 0}}, {{"l", "A", "B", {}, -5.0}}), DataError);
  EXPECT_THROW(make_graph({{"A", 0, 95}, {"B", 1, 0}}, {}, CoordMode::geographic), DataError);
}

TEST(RoadGraph, ExplicitLengthWins) {
  const auto g = make_graph({{"A", 0, 0}, {"B", 3, 4}}, {{"l", "A", "B", {}, 42.0}, {"m", "B", "A"}});
  EXPECT_DOUBLE_EQ(g.links()[0].length_m, 42.0);
  EXPECT_DOUBLE_EQ(g.links()[1].length_m, 5.0);
}

TEST(RoadGraph, PolylineLengthMatchesSegmentSumOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.01, 0.01);
  for (const CoordMode mode : {CoordMode::planar, CoordMode::geographic}) {
    for (int trial = 0; trial < 200; ++trial) {
      const double scale = mode == CoordMode::planar ? 1e5 : 1.0;
      const GeoPoint a{10.0 + u(rng) * scale, 45.0 + u(rng) * scale};
      const GeoPoint b{10.0 + u(rng) * scale, 45.0 + u(rng) * scale};
      std::vector<GeoPoint> shape;
      for (int k = 0; k < trial % 6; ++k) shape.push_back({10.0 + u(rng) * scale, 45.0 + u(rng) * scale});
      const auto g = make_graph({{"a", a.x, a.y}, {"b", b.x, b.y}}, {{"l", "a", "b", shape}}, mode);
      std::vector<GeoPoint> pts{a};
      pts.insert(pts.end(), shape.begin(), shape.end());
      pts.push_back(b);
      double ref = 0.0;
      for (std::size_t i = 1; i < pts.size(); ++i)
        ref += mode == CoordMode::planar ? std::hypot(pts[i].x - pts[i - 1].x, pts[i].y - pts[i - 1].y)
                                         : oracle::chord_sphere_m(pts[i - 1], pts[i]);
      EXPECT_NEAR(g.links()[0].length_m, ref, 1e-9 * ref);
    }
  }
}

TEST(PointInPolygon, UnitSquare) {
  const auto sq = rect(0, 0, 1, 1);
  EXPECT_TRUE(point_in_polygon({0.5, 0.5}, sq));
  EXPECT_FALSE(point_in_polygon({1.5, 0.5}, sq));
  EXPECT_TRUE(point_in_polygon({0, 0}, sq));
  EXPECT_TRUE(point_in_polygon({1, 0.5}, sq));
  EXPECT_FALSE(point_in_polygon({-1e-9, 0.5}, sq));
}

TEST(PointInPolygon, HoleExcludesInteriorKeepsEdge) {
  const auto b = make_boundary("h", {Polygon{{Ring{{0, 0}, {10, 0}, {10, 10}, {0, 10}},
                                               Ring{{4, 4}, {6, 4}, {6, 6}, {4, 6}}}}});
  EXPECT_FALSE(point_in_polygon({5, 5}, b));
  EXPECT_TRUE(point_in_polygon({4, 5}, b));
  EXPECT_TRUE(point_in_polygon({2, 2}, b));
  EXPECT_NEAR(boundary_area_km2(b, CoordMode::planar), 96e-6, 1e-15);
}

TEST(Clip, EndpointOutsideDropsLink) {
  const auto g = make_graph({{"a", 0.5, 0.5}, {"b", 2, 2}}, {{"l", "a", "b"}});
  const auto c = clip_to_city(g, rect(0, 0, 1, 1));
  EXPECT_EQ(c.graph.node_count(), 1u);
  EXPECT_EQ(c.graph.link_count(), 0u);
}

TEST(Clip, ContainingBoundaryIsIdentity) {
  const auto g = grid_graph(4);
  const auto c = clip_to_city(g, rect(-1, -1, 1000, 1000));
  EXPECT_TRUE(c.graph == g);
}

TEST(Clip, SquareArea) {
  const auto g = grid_graph(3);
  const auto c = clip_to_city(g, rect(0, 0, 10000, 10000));
  EXPECT_NEAR(c.area_km2, 100.0, 1e-9);
}

TEST(Clip, NoNodeInsideIsEmptyCity) {
  const auto g = grid_graph(3);
  EXPECT_THROW(clip_to_city(g, rect(5000, 5000, 6000, 6000, "far")), EmptyCityError);
}

TEST(Clip, NoDanglingLinksAndIdempotent) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1000);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<N> nodes;
    std::vector<L> links;
    for (int i = 0; i < 40; ++i) nodes.push_back({"n" + std::to_string(i), u(rng), u(rng)});
    std::uniform_int_distribution<int> pick(0, 39);
    for (int e = 0; e < 80; ++e) {
      const int a = pick(rng), b = pick(rng);
      if (a != b) links.push_back({"l" + std::to_string(e), nodes[a].id, nodes[b].id});
    }
    const auto g = make_graph(nodes, links);
    const auto boundary = make_boundary(
        "tri", {Polygon{{Ring{{u(rng) / 4, u(rng) / 4}, {1000 - u(rng) / 4, u(rng) / 2}, {u(rng), 1000}}}}});
    CityNetwork c;
    try {
      c = clip_to_city(g, boundary);
    } catch (const EmptyCityError&) {
      continue;
    }
    for (const auto& l : c.graph.links()) {
      ASSERT_TRUE(c.graph.find_node(l.from));
      ASSERT_TRUE(c.graph.find_node(l.to));
      ASSERT_TRUE(point_in_polygon(c.graph.nodes()[l.from_index].location, boundary));
    }
    const auto again = clip_to_city(c.graph, boundary);
    EXPECT_TRUE(again.graph == c.graph);
  }
}

TEST(Io, CsvRoundTripAndGeojsonRings) {
  const auto dir = scratch_dir("io");
  const auto g = make_graph({{"a", 0, 0}, {"b,1", 10, 0}, {"c", 10, 10}},
                            {{"l1", "a", "b,1", {{5, 1}, {7, 1}}}, {"l2", "b,1", "c"}, {"l3", "c", "a", {}, 99.5}});
  {
    std::ofstream n(dir / "nodes.csv"), l(dir / "links.csv");
    write_nodes_csv(n, g.nodes());
    write_links_csv(l, g.links());
  }
  const auto back = load_graph(dir / "nodes.csv", dir / "links.csv", CoordMode::planar);
  EXPECT_TRUE(back == g);

  const auto b = make_boundary("x", {Polygon{{Ring{{0, 0}, {1, 0}, {1, 1}}}}});
  {
    std::ofstream out(dir / "b.geojson");
    out << boundaries_to_geojson({b}).dump();
  }
  const auto bs = read_boundaries_geojson(dir / "b.geojson");
  ASSERT_EQ(bs.size(), 1u);
  EXPECT_EQ(bs[0].city_name, "x");
  EXPECT_EQ(bs[0].polygons[0].rings[0].size(), 3u);  // closing vertex dropped on read
}

TEST(Io, MalformedInputsAreDataErrors) {
  const auto dir = scratch_dir("io_bad");
  {
    std::ofstream(dir / "nodes.csv") << "id,x,y\na,0,0\n";
    std::ofstream(dir / "nodes2.csv") << "node_id,x,y\na,zero,0\n";
    std::ofstream(dir / "b.geojson") << "{\"type\": \"FeatureCollection\", \"features\": [{\"properties\": {}}]}";
    std::ofstream(dir / "c.geojson") << "{not json";
  }
  EXPECT_THROW(read_nodes_csv(dir / "nodes.csv"), DataError);
  EXPECT_THROW(read_nodes_csv(dir / "nodes2.csv"), DataError);
  EXPECT_THROW(read_boundaries_geojson(dir / "b.geojson"), DataError);
  EXPECT_THROW(read_boundaries_geojson(dir / "c.geojson"), DataError);
  EXPECT_THROW(read_nodes_csv(dir / "missing.csv"), DataError);
}
