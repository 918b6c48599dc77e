#include <random>

#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace citymorph;
using namespace testing_util;

namespace {

double circular_diff(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 360.0);
  return std::min(d, 360.0 - d);
}

std::vector<double> random_partition(std::mt19937_64& rng, int parts) {
  std::uniform_real_distribution<double> u(0.0, 360.0);
  std::vector<double> cuts;
  for (int i = 0; i < parts; ++i) cuts.push_back(u(rng));
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> gaps;
  for (int i = 1; i < parts; ++i) gaps.push_back(cuts[i] - cuts[i - 1]);
  gaps.push_back(360.0 - (cuts.back() - cuts.front()));
  return gaps;
}

std::vector<SyntheticCity> small_corpus() { return generate_corpus({kArchetypes[0], kArchetypes[1], kArchetypes[2]}, 3, 9); }

}  // namespace

TEST(Angle, QuarterTurns) {
  EXPECT_EQ(angle({1, 0}, {0, 0}, {0, 1}), 90.0);
  EXPECT_EQ(angle({0, 1}, {0, 0}, {1, 0}), 270.0);
  EXPECT_EQ(angle({1, 0}, {0, 0}, {-1, 0}), 180.0);
}

// Rays placed at known polar angles; the expected value is their difference.
TEST(Angle, MatchesConstructedRotation) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> deg(0.0, 360.0), r(0.01, 500.0), c(-1e4, 1e4);
  double lo = 360, hi = 0;
  for (int i = 0; i < 1000; ++i) {
    const GeoPoint o{c(rng), c(rng)};
    const double ta = deg(rng), tb = deg(rng), ra = r(rng), rb = r(rng);
    const double rad = std::numbers::pi / 180.0;
    const GeoPoint a{o.x + ra * std::cos(ta * rad), o.y + ra * std::sin(ta * rad)};
    const GeoPoint b{o.x + rb * std::cos(tb * rad), o.y + rb * std::sin(tb * rad)};
    double expected = tb - ta;
    if (expected < 0) expected += 360.0;
    const double got = angle(a, o, b);
    ASSERT_GE(got, 0.0);
    ASSERT_LT(got, 360.0);
    ASSERT_LT(circular_diff(got, expected), 1e-9) << i;
    lo = std::min(lo, got);
    hi = std::max(hi, got);
  }
  EXPECT_LT(lo, 5.0);
  EXPECT_GT(hi, 355.0);
}

TEST(Angle, ReversedArgumentsComplement) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 500; ++i) {
    const GeoPoint a{u(rng), u(rng)}, o{u(rng), u(rng)}, b{u(rng), u(rng)};
    EXPECT_LT(circular_diff(angle(a, o, b) + angle(b, o, a), 0.0), 1e-9);
  }
  EXPECT_EQ(angle({1, 0}, {0, 0}, {-1, 0}) + angle({-1, 0}, {0, 0}, {1, 0}), 360.0);
}

TEST(Angle, CoincidentPointIsDegenerate) {
  EXPECT_THROW(angle({0, 0}, {0, 0}, {1, 0}), DegenerateGeometryError);
}

TEST(Angle, GeographicUsesLocalPlane) {
  EXPECT_NEAR(angle({10.001, 45}, {10, 45}, {10, 45.001}, CoordMode::geographic), 90.0, 1e-6);
}

TEST(OutgoingRay, StraightAndFallback) {
  const auto g = make_graph({{"o", 0, 0}, {"t", 10, 0}},
                            {{"a", "o", "t"}, {"b", "t", "o"}, {"c", "o", "t", {{0, 0}, {3, 4}}}});
  EXPECT_EQ(outgoing_ray(g.links()[0], g), (GeoPoint{10, 0}));
  EXPECT_EQ(outgoing_ray(g.links()[2], g), (GeoPoint{3, 4}));
}

TEST(NodeAngles, Examples) {
  auto star = [](const std::vector<GeoPoint>& tips) {
    std::vector<N> nodes{{"o", 0, 0}};
    std::vector<L> links;
    for (std::size_t i = 0; i < tips.size(); ++i) {
      nodes.push_back({"t" + std::to_string(i), tips[i].x, tips[i].y});
      links.push_back({"l" + std::to_string(i), "o", nodes.back().id});
    }
    return make_graph(nodes, links);
  };
  auto close = [](std::vector<double> got, std::vector<double> want) {
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-9);
  };
  const double s = std::sqrt(3.0) / 2;
  close(node_angles(0, star({{1, 0}, {0, 1}, {-1, 0}, {0, -1}})), {90, 90, 90, 90});
  close(node_angles(0, star({{1, 0}, {0, 1}, {-1, 0}})), {90, 90, 180});
  close(node_angles(0, star({{1, 0}, {0.5, s}, {-1, 0}})), {60, 120, 180});
  close(node_angles(0, star({{-1, 0}, {1, 0}, {0.5, s}})), {60, 120, 180});
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify_pattern({120, 120, 120}, 3), 3);
  EXPECT_EQ(classify_pattern({60, 60, 240}, 3), 6);
  EXPECT_EQ(classify_pattern({90, 90, 180}, 3), 1);
  EXPECT_EQ(classify_pattern({45, 135, 180}, 3), 2);
  EXPECT_EQ(classify_pattern({90, 90, 90, 90}, 4), 1);
  EXPECT_THROW(classify_pattern({180, 180}, 2), ValidationError);
}

TEST(Classify, TotalOnRandomPartitions) {
  std::mt19937_64 rng(4);
  for (int degree : {3, 4}) {
    std::array<int, 8> seen{};
    for (int i = 0; i < 1000; ++i) {
      const auto gaps = random_partition(rng, degree);
      const PatternType t = classify_pattern(gaps, degree);
      ASSERT_GE(t, 1);
      ASSERT_LE(t, kPatternTypes);
      ++seen[static_cast<std::size_t>(t)];
    }
    int distinct = 0;
    for (int v : seen) distinct += v > 0;
    EXPECT_GE(distinct, 4);
  }
}

TEST(Patterns, JitterFreeGridIsAllType1) {
  const auto pc = pattern_counts(as_city(grid_graph(10)));
  EXPECT_EQ(pc.d4_nodes, 64u);
  EXPECT_EQ(pc.d3_nodes, 32u);
  EXPECT_DOUBLE_EQ(pc.d4[1], 1.0);
  EXPECT_DOUBLE_EQ(pc.d3[1], 1.0);
}

TEST(Patterns, SingleTJunction) {
  const auto g = make_graph({{"c", 0, 0}, {"e", 1, 0}, {"n", 0, 1}, {"w", -1, 0}},
                            {{"1", "c", "e"}, {"2", "e", "c"}, {"3", "c", "n"}, {"4", "n", "c"}, {"5", "c", "w"},
                             {"6", "w", "c"}});
  const auto pc = pattern_counts(as_city(g));
  EXPECT_DOUBLE_EQ(pc.d3[1], 1.0);
  for (double v : pc.d4) EXPECT_EQ(v, 0.0);
}

TEST(Patterns, EmptyCityAllZero) {
  const auto pc = pattern_counts(as_city(RoadGraph{}));
  for (double v : pc.d3) EXPECT_EQ(v, 0.0);
  for (double v : pc.d4) EXPECT_EQ(v, 0.0);
}

TEST(Patterns, CoincidentRaysGiveZeroGap) {
  const auto g = make_graph({{"c", 0, 0}, {"e", 1, 0}, {"f", 2, 0}, {"n", 0, 1}},
                            {{"1", "c", "e"}, {"2", "c", "f"}, {"3", "c", "n"}});
  const auto patterns = node_patterns(as_city(g));
  ASSERT_EQ(patterns.size(), 1u);
  const auto gaps = patterns[0].angles;
  ASSERT_EQ(gaps.size(), 3u);
  EXPECT_EQ(std::count(gaps.begin(), gaps.end(), 0.0), 1);
}

TEST(Patterns, AnglesSumTo360AcrossCorpus) {
  for (const auto& sc : small_corpus()) {
    const auto& g = sc.city.graph;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      if (g.out_links(i).size() < 2) continue;
      const auto a = node_angles(i, g);
      double sum = 0;
      for (double v : a) {
        EXPECT_GE(v, 0.0);
        sum += v;
      }
      EXPECT_NEAR(sum, 360.0, 1e-6);
      if (a.size() == 3) {
        int straight = 0, reflex = 0;
        for (double v : a) {
          straight += categorize(v) == AngleCategory::straight;
          reflex += categorize(v) == AngleCategory::reflex;
        }
        EXPECT_LE(straight, 1);
        EXPECT_LE(reflex, 1);
      }
    }
  }
}

TEST(Patterns, RotationInvariant) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 360.0);
  for (const auto& sc : small_corpus()) {
    const auto before = node_patterns(sc.city);
    const auto after = node_patterns(rotate(sc.city, u(rng), {1000, -500}));
    ASSERT_EQ(before.size(), after.size());
    for (std::size_t i = 0; i < before.size(); ++i) EXPECT_EQ(before[i].type, after[i].type) << before[i].node_id;
  }
}

TEST(Bearing, Compass) {
  const auto g = make_graph({{"o", 0, 0}, {"n", 0, 10}, {"e", 10, 0}, {"w", -10, 0}},
                            {{"1", "o", "n"}, {"2", "o", "e"}, {"3", "o", "w"}});
  EXPECT_EQ(link_bearing(g.links()[0], g), 0.0);
  EXPECT_EQ(link_bearing(g.links()[1], g), 90.0);
  EXPECT_EQ(link_bearing(g.links()[2], g), 270.0);
}

TEST(Bearing, GeographicNorthAndEast) {
  const auto g = make_graph({{"o", 10, 45}, {"n", 10, 45.01}, {"e", 10.01, 45}}, {{"1", "o", "n"}, {"2", "o", "e"}},
                            CoordMode::geographic);
  EXPECT_NEAR(link_bearing(g.links()[0], g), 0.0, 1e-9);
  EXPECT_NEAR(link_bearing(g.links()[1], g), 90.0, 0.01);
}
