#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "critwin/configuration.hpp"
#include "critwin/oracles.hpp"
#include "critwin/rng.hpp"

namespace critwin {
namespace {

std::int64_t double_factorial(std::int64_t m) {
  std::int64_t out = 1;
  for (std::int64_t k = m; k > 1; k -= 2) out *= k;
  return out;
}

TEST(Enumerate, Counts) {
  EXPECT_EQ(enumerate_configurations(build_sequence({1, 1})).size(), 1u);
  EXPECT_EQ(enumerate_configurations(build_sequence({1, 1, 1, 1})).size(), 3u);
  EXPECT_EQ(enumerate_configurations(build_sequence({1, 1, 1, 3})).size(), 15u);
  EXPECT_EQ(enumerate_configurations(build_sequence({4, 2, 3, 3})).size(), static_cast<std::size_t>(double_factorial(11)));
  EXPECT_THROW(enumerate_configurations(build_sequence({7, 7})), TooLarge);
}

TEST(Enumerate, DistinctPerfectMatchings) {
  const auto seq = build_sequence({2, 1, 3});
  const auto all = enumerate_configurations(seq);
  std::set<std::vector<CopyId>> seen;
  for (const auto& g : all) {
    const auto& p = g.partner();
    for (CopyId c = 0; c < p.size(); ++c) {
      ASSERT_NE(p[c], c);
      ASSERT_EQ(p[p[c]], c);
    }
    seen.insert(p);
  }
  EXPECT_EQ(seen.size(), all.size());
  EXPECT_EQ(all.size(), 15u);
}

TEST(Sample, DegreesArePreserved) {
  Rng rng(3);
  const auto seq = family_mixed13(1000, 0.1);
  const auto g = sample_configuration(seq, rng);
  std::vector<std::int64_t> deg(seq.n(), 0);
  for (const auto& e : g.edges()) {
    ++deg[e.u];
    ++deg[e.v];
  }
  for (Vertex v = 0; v < seq.n(); ++v) ASSERT_EQ(deg[v], seq.degree(v));
  EXPECT_EQ(static_cast<std::int64_t>(g.edges().size()), seq.edge_count());
  EXPECT_EQ(g.matching().size(), g.edges().size());
}

TEST(Sample, UniformOnSmallSequences) {
  Rng rng(1234);
  for (auto d : {std::vector<std::int64_t>{1, 1, 1, 3}, std::vector<std::int64_t>{2, 2, 2},
                 std::vector<std::int64_t>{4}}) {
    const auto rep = uniformity_check(build_sequence(d), 20000, rng);
    EXPECT_TRUE(rep.pass()) << rep.sampler.statistic << " " << rep.exploration.statistic;
  }
}

TEST(IsSimple, Examples) {
  const auto loop = ConfigurationGraph::from_pairing(build_sequence({2}), std::vector<CopyId>{0, 1});
  const auto v1 = is_simple(loop);
  EXPECT_FALSE(v1.is_simple);
  EXPECT_EQ(v1.loop_count, 1);

  // Two copies of vertex 0 each paired with a copy of vertex 1.
  const auto multi = ConfigurationGraph::from_pairing(build_sequence({2, 2}), std::vector<CopyId>{0, 2, 1, 3});
  const auto v2 = is_simple(multi);
  EXPECT_FALSE(v2.is_simple);
  EXPECT_EQ(v2.multi_edge_count, 1);
  EXPECT_EQ(v2.loop_count, 0);

  const auto path = ConfigurationGraph::from_pairing(build_sequence({1, 2, 1}), std::vector<CopyId>{0, 1, 2, 3});
  EXPECT_TRUE(is_simple(path).is_simple);
}

TEST(IsSimple, StarCount) {
  // (1,1,1,3) is simple only as the star: 3! of the 15 matchings.
  int simple = 0;
  for (const auto& g : enumerate_configurations(build_sequence({1, 1, 1, 3}))) simple += is_simple(g).is_simple;
  EXPECT_EQ(simple, 6);
}

TEST(SampleSimple, TrivialCases) {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sample_simple(build_sequence({1, 1}), rng).attempts, 1);
  EXPECT_THROW(sample_simple(build_sequence({2}), rng), Exhausted);
  EXPECT_THROW(sample_simple(build_sequence({2}), rng, 0), PreconditionViolated);
}

TEST(SampleSimple, UniformOverSimpleGraphs) {
  Rng rng(77);
  const auto res = simple_uniformity_check(build_sequence({1, 1, 2, 2, 2}), 20000, rng);
  EXPECT_TRUE(res.pass) << res.statistic;
}

TEST(SimplicityFormula, ValueAtZero) {
  EXPECT_NEAR(simplicity_probability_formula(build_sequence({1, 1, 1, 3})), std::exp(-0.75), 1e-15);
  EXPECT_NEAR(simplicity_probability_formula(build_sequence({1, 1})), 1.0, 1e-15);
}

TEST(PairJoin, SmallExamples) {
  const auto seq = build_sequence({1, 1, 1, 3});
  const std::vector<CopyPair> one = {{{0, 0}, {3, 0}}};
  const auto p1 = pair_join_probability(seq, one);
  EXPECT_EQ(p1.exact, Rational(1, 5));
  ASSERT_TRUE(p1.bound);
  EXPECT_EQ(*p1.bound, Rational(1, 4));

  const std::vector<CopyPair> two = {{{0, 0}, {3, 0}}, {{1, 0}, {3, 1}}};
  const auto p2 = pair_join_probability(seq, two);
  EXPECT_EQ(p2.exact, Rational(1, 15));
  EXPECT_EQ(*p2.bound, Rational(1, 8));

  const std::vector<CopyPair> three = {{{0, 0}, {3, 0}}, {{1, 0}, {3, 1}}, {{2, 0}, {3, 2}}};
  const auto p3 = pair_join_probability(seq, three);
  EXPECT_EQ(p3.exact, Rational(1, 15));
  EXPECT_FALSE(p3.bound);

  EXPECT_EQ(pair_join_probability(seq, {}).exact, Rational(1));
}

TEST(PairJoin, Errors) {
  const auto seq = build_sequence({1, 1, 1, 3});
  const std::vector<CopyPair> overlap = {{{0, 0}, {3, 0}}, {{3, 0}, {1, 0}}};
  EXPECT_THROW(pair_join_probability(seq, overlap), OverlappingPairs);
  const std::vector<CopyPair> bad = {{{0, 1}, {3, 0}}};
  EXPECT_THROW(pair_join_probability(seq, bad), PreconditionViolated);
}

TEST(PairJoin, MatchesEnumeration) {
  for (auto d : {std::vector<std::int64_t>{1, 1, 1, 3}, std::vector<std::int64_t>{2, 2, 2},
                 std::vector<std::int64_t>{1, 2, 3, 2}}) {
    const auto rep = pair_join_check(build_sequence(d));
    EXPECT_TRUE(rep.pass());
    EXPECT_EQ(rep.pair_sets, partial_matching_count(build_sequence(d).copy_count()));
  }
}

TEST(EdgeList, Golden) {
  const auto g = ConfigurationGraph::from_pairing(build_sequence({1, 1, 1, 3}),
                                                  std::vector<CopyId>{5, 2, 0, 3, 4, 1});
  std::ostringstream os;
  write_edge_list(os, g);
  EXPECT_EQ(os.str(), "0 3\n1 3\n2 3\n");
}

TEST(Census, FromGraph) {
  // 0-1 edge, loop at 2, double edge 3-4
  const auto g = ConfigurationGraph::from_pairing(build_sequence({1, 1, 2, 2, 2}),
                                                  std::vector<CopyId>{0, 1, 2, 3, 4, 6, 5, 7});
  const auto c = census_of(g);
  ASSERT_EQ(c.components.size(), 3u);
  EXPECT_EQ(c.total_vertices(), 5);
  EXPECT_EQ(c.total_edges(), 4);
  EXPECT_EQ(c.complex_count(), 0);
  EXPECT_EQ(c.max_excess(), 0);
}

TEST(Rng, SeedDerivationIsStable) {
  EXPECT_EQ(derive_seed(1, "mixed13", 100, 0), derive_seed(1, "mixed13", 100, 0));
  EXPECT_NE(derive_seed(1, "mixed13", 100, 0), derive_seed(1, "mixed13", 100, 1));
  EXPECT_NE(derive_seed(1, "mixed13", 100, 0), derive_seed(2, "mixed13", 100, 0));
  EXPECT_NE(derive_seed(1, "mixed13", 100, 0), derive_seed(1, "heavy_vertex", 100, 0));
}

}  // namespace
}  // namespace critwin
