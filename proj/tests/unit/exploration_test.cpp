#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "critwin/configuration.hpp"
#include "critwin/exploration.hpp"

namespace critwin {
namespace {

DegreeSequence random_sequence(std::mt19937_64& rng, int max_n) {
  std::uniform_int_distribution<int> len(1, max_n);
  std::uniform_int_distribution<int> deg(1, 6);
  std::vector<std::int64_t> d(static_cast<std::size_t>(len(rng)));
  std::int64_t sum = 0;
  for (auto& x : d) {
    x = deg(rng);
    sum += x;
  }
  if (sum % 2) d.push_back(1);
  return build_sequence(d);
}

TEST(Exploration, StartStateAtHighDegreeVertex) {
  const auto st = start_exploration(build_sequence({1, 1, 1, 3}), Vertex{3});
  EXPECT_EQ(st.y(), 3);
  EXPECT_EQ(st.d_total(), 6);
  EXPECT_EQ(st.q_t(), Rational(-7, 5));
  EXPECT_EQ(st.r_t(), Rational(11, 5));
  const auto e = exact_step_expectation(st);
  EXPECT_FALSE(e.from_zero);
  EXPECT_EQ(e.mean, Rational(-7, 5));
  EXPECT_EQ(e.second_moment, Rational(11, 5));
}

TEST(Exploration, StartOutOfRange) {
  EXPECT_THROW(start_exploration(build_sequence({1, 1}), Vertex{2}), PreconditionViolated);
}

TEST(Exploration, SingleEdge) {
  Rng rng(1);
  auto st = start_exploration(build_sequence({1, 1}));
  const auto rec = st.step(rng);
  EXPECT_EQ(rec.eta, -1);
  EXPECT_EQ(rec.y_after, 0);
  EXPECT_EQ(rec.d_after, 0);
  ASSERT_TRUE(rec.new_vertex);
  EXPECT_EQ(*rec.new_vertex, 1u);
  EXPECT_TRUE(st.halted());
  EXPECT_THROW(st.step(rng), Halted);
  EXPECT_THROW(st.q_t(), Halted);
  ASSERT_EQ(st.census().components.size(), 1u);
  EXPECT_EQ(st.census().components[0].vertices, 2);
  EXPECT_EQ(st.census().components[0].edges, 1);
}

TEST(Exploration, LoopIsUnicyclic) {
  Rng rng(1);
  const auto out = explore_all(build_sequence({2}), rng);
  ASSERT_EQ(out.census.components.size(), 1u);
  EXPECT_EQ(out.census.components[0].cls(), ComponentClass::unicyclic);
}

TEST(Exploration, CensusConservationProperty) {
  std::mt19937_64 gen(21);
  Rng rng(22);
  for (int i = 0; i < 300; ++i) {
    const auto seq = random_sequence(gen, 80);
    ExploreOptions opts;
    opts.record_trace = true;
    opts.record_pairing = true;
    const auto out = explore_all(seq, rng, opts);
    ASSERT_EQ(out.census.total_vertices(), static_cast<std::int64_t>(seq.n()));
    ASSERT_EQ(out.census.total_edges(), seq.edge_count());
    const auto& trace = *out.trace;
    ASSERT_EQ(trace.component_starts.size() + 1, out.census.components.size());
    ASSERT_EQ(static_cast<std::int64_t>(trace.steps.size()),
              seq.edge_count() + static_cast<std::int64_t>(trace.component_starts.size()));

    // Each component's matching steps equal its edge count.
    std::vector<std::int64_t> matched(out.census.components.size(), 0);
    for (const auto& s : trace.steps) {
      if (!s.restart) ++matched[static_cast<std::size_t>(s.component_id)];
    }
    for (std::size_t k = 0; k < matched.size(); ++k) ASSERT_EQ(matched[k], out.census.components[k].edges);

    // The exposed pairing is a perfect matching of the copies.
    auto sorted = out.pairing;
    std::sort(sorted.begin(), sorted.end());
    for (CopyId c = 0; c < sorted.size(); ++c) ASSERT_EQ(sorted[c], c);

    // D_t >= 2|E| - 2t, with equality until the first restart.
    for (const auto& s : trace.steps) ASSERT_GE(s.d_after, 2 * seq.edge_count() - 2 * s.t);
  }
}

TEST(Exploration, CensusAgreesWithUnionFindOnSamePairing) {
  std::mt19937_64 gen(41);
  Rng rng(42);
  auto key = [](const ComponentCensus& c) {
    std::multiset<std::pair<std::int64_t, std::int64_t>> out;
    for (const auto& r : c.components) out.emplace(r.vertices, r.edges);
    return out;
  };
  for (int i = 0; i < 200; ++i) {
    const auto seq = i % 2 ? random_sequence(gen, 200) : family_mixed13(3000, 0.0);
    ExploreOptions opts;
    opts.record_pairing = true;
    const auto out = explore_all(seq, rng, opts);
    const auto g = ConfigurationGraph::from_pairing(seq, out.pairing);
    ASSERT_EQ(key(out.census), key(census_of(g)));
  }
}

TEST(Exploration, RunningSumsStayExact) {
  std::mt19937_64 gen(5);
  Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    ExplorationState st(random_sequence(gen, 60));
    while (!st.halted()) {
      st.step(rng);
      ASSERT_TRUE(st.running_sums_consistent());
    }
  }
}

TEST(Exploration, StepMomentsMatchClosedFormsProperty) {
  std::mt19937_64 gen(8);
  Rng rng(9);
  int states = 0, from_zero = 0;
  for (int i = 0; i < 200; ++i) {
    ExplorationState st(random_sequence(gen, 40));
    while (!st.halted()) {
      const auto e = st.exact_step_expectation();  // throws on disagreement
      ++states;
      from_zero += e.from_zero;
      if (e.from_zero && st.d_total() >= 2) {
        ASSERT_GE(e.second_moment, st.r_t() / 2);
      }
      st.step(rng);
    }
  }
  EXPECT_GT(states, 1000);
  EXPECT_GT(from_zero, 0);
}

TEST(Exploration, RestartIsSizeBiased) {
  // After the (1,1) edge from vertex 0 closes, the next component starts at
  // vertex 2 (degree 1) or vertex 3 (degree 3) with odds 1:3.
  const auto seq = build_sequence({1, 1, 1, 3});
  Rng rng(31);
  int at_three = 0, restarts = 0;
  for (int i = 0; i < 40000; ++i) {
    ExplorationState st(seq, Vertex{0});
    const auto first = st.step(rng);
    if (first.y_after != 0) continue;
    const auto second = st.step(rng);
    ASSERT_TRUE(second.restart);
    ++restarts;
    at_three += *second.new_vertex == 3u;
  }
  // vertex 0 joins vertex 1 or 2 with probability 2/5
  EXPECT_NEAR(static_cast<double>(restarts) / 40000.0, 0.4, 0.02);
  EXPECT_NEAR(static_cast<double>(at_three) / restarts, 0.75, 0.02);
}

TEST(Trace, CsvLayout) {
  Rng rng(2);
  ExploreOptions opts;
  opts.record_trace = true;
  const auto out = explore_all(build_sequence({1, 1}), rng, opts);
  std::ostringstream os;
  write_trace_csv(os, *out.trace);
  EXPECT_EQ(os.str(), "t,y,d_total,q_t,r_t,eta,component_id\n0,1,2,-1,1,,0\n1,0,0,,,-1,0\n");
}

TEST(Trace, StepLimitTruncatesRecording) {
  Rng rng(2);
  ExploreOptions opts;
  opts.record_trace = true;
  opts.trace_step_limit = 10;
  const auto out = explore_all(family_mixed13(1000, 0.0), rng, opts);
  EXPECT_EQ(out.trace->steps.size(), 10u);
  EXPECT_EQ(out.census.total_vertices(), 1000);
}

TEST(Concentration, HorizonsAndVacuousCase) {
  const auto seq = family_mixed13(100, 0.0);
  ExplorationTrace empty;
  const auto rep = trace_concentration_check(empty, seq, 0.05);
  EXPECT_EQ(rep.r_horizon, 0);
  EXPECT_TRUE(rep.r_pass);
  EXPECT_TRUE(rep.q_pass);
}

TEST(Concentration, PassesOnRealTrace) {
  const auto seq = family_mixed13(100000, 0.0);
  Rng rng(4);
  ExploreOptions opts;
  opts.record_trace = true;
  const auto out = explore_all(seq, rng, opts);
  const auto rep = trace_concentration_check(*out.trace, seq, 0.05);
  EXPECT_EQ(rep.r_horizon, 4);
  EXPECT_TRUE(rep.r_pass);
  EXPECT_TRUE(rep.q_pass);
}

TEST(Concentration, FlagsAdversarialTrace) {
  const auto seq = family_mixed13(100000, 0.0);
  ExplorationTrace trace;
  StepRecord s;
  s.t = 1;
  s.q_after = 0.0;
  s.r_after = 10.0;
  trace.steps.push_back(s);
  s.t = 2;
  s.q_after = 1e6;
  s.r_after = 1.0;
  trace.steps.push_back(s);
  const auto rep = trace_concentration_check(trace, seq, 0.05);
  EXPECT_FALSE(rep.r_pass);
  EXPECT_EQ(rep.first_r_violation, 1);
  EXPECT_FALSE(rep.q_pass);
  EXPECT_EQ(rep.first_q_violation, 2);
}

}  // namespace
}  // namespace critwin
