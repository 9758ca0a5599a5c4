#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "test_support.hpp"
#include "wdn/orientation.hpp"

namespace wdn {
namespace {

std::set<std::vector<int>> enumerated(const Network& n) {
  OrientationSet set = enumerate_orientations(reduce_graph(n));
  std::set<std::vector<int>> out;
  for (const auto& o : set.orientations) EXPECT_TRUE(out.insert(o.direction).second) << "duplicate";
  EXPECT_TRUE(set.exhaustive);
  return out;
}

TEST(EnumerateOrientations, MatchesBruteForceOnSmallGraphs) {
  for (const auto& g : test::small_graphs()) {
    ASSERT_LE(g.edges.size(), 12u);
    Network n = test::make_network(g.nodes, g.edges);
    EXPECT_EQ(enumerated(n), test::brute_force(n)) << g.name;
  }
  for (const char* f : {"two_loop.json", "toy_cycle.json", "tree.json"}) {
    Network n = load_network(test::data_path(f));
    EXPECT_EQ(enumerated(n), test::brute_force(n)) << f;
  }
}

TEST(EnumerateOrientations, TwoLoopHasNine) {
  Network n = load_network(test::data_path("two_loop.json"));
  EXPECT_EQ(enumerated(n).size(), 9u);
}

TEST(EnumerateOrientations, TreeHasOneAwayFromSource) {
  Network n = load_network(test::data_path("tree.json"));
  ReducedGraph r = reduce_graph(n);
  EXPECT_EQ(r.edge_count(), 0u);
  auto all = enumerated(n);
  ASSERT_EQ(all.size(), 1u);
  // Every link points away from the source: the head is farther from it.
  const auto& d = *all.begin();
  std::vector<int> depth(n.node_count(), -1);
  depth[n.source()] = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (const Link& l : n.links()) {
      if (depth[l.tail] >= 0 && depth[l.head] < 0) depth[l.head] = depth[l.tail] + 1, changed = true;
      if (depth[l.head] >= 0 && depth[l.tail] < 0) depth[l.tail] = depth[l.head] + 1, changed = true;
    }
  }
  for (std::size_t j = 0; j < n.link_count(); ++j) {
    const Link& l = n.link(j);
    EXPECT_EQ(d[j], depth[l.head] > depth[l.tail] ? 1 : -1);
  }
}

TEST(ReduceGraph, SingleCycleBecomesALoopAtTheSource) {
  Network n = test::make_network(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  ReducedGraph r = reduce_graph(n);
  EXPECT_EQ(r.edge_count(), 0u);
  ASSERT_EQ(r.loops().size(), 1u);
  EXPECT_EQ(r.exprs()[r.loops()[0]].a, n.source());
}

TEST(ReduceGraph, EveryStepShrinksTheGraph) {
  for (const auto& g : test::small_graphs()) {
    ReducedGraph r = reduce_graph(test::make_network(g.nodes, g.edges));
    std::size_t edges = g.edges.size();
    for (const auto& step : r.steps()) {
      EXPECT_LT(step.edges_after, edges) << g.name;
      edges = step.edges_after;
    }
  }
}

TEST(EnumerateOrientations, SamplingIsSeededAndFeasible) {
  Network n = load_network(test::data_path("hanoi.json"));
  ReducedGraph r = reduce_graph(n);
  EnumerationOptions opt;
  opt.sample_budget = 100;
  opt.seed = 17;
  OrientationSet a = enumerate_orientations(r, opt);
  OrientationSet b = enumerate_orientations(r, opt);
  EXPECT_EQ(a.orientations, b.orientations);
  EXPECT_GE(a.orientations.size(), 1u);
  EXPECT_LE(a.orientations.size(), 100u);
  EXPECT_EQ(a.draws, 100u);
  for (const auto& o : a.orientations) {
    EXPECT_TRUE(is_feasible(o, n));
    EXPECT_TRUE(test::oracle_feasible(n, o.direction));
  }
}

TEST(EnumerateOrientations, SmallSetReturnedWholeUnderSampling) {
  Network n = load_network(test::data_path("two_loop.json"));
  EnumerationOptions opt;
  opt.sample_budget = 100;
  OrientationSet s = enumerate_orientations(reduce_graph(n), opt);
  EXPECT_EQ(s.orientations.size(), 9u);
  EXPECT_TRUE(s.exhaustive);
}

TEST(IsFeasible, ReasonsAndWitnesses) {
  Network n = test::make_network(3, {{0, 1}, {0, 1}, {1, 2}});
  // Parallel pair directed opposite ways: a 2-cycle.
  Orientation cyc;
  cyc.direction = {1, -1, 1};
  Feasibility f = is_feasible(cyc, n);
  EXPECT_FALSE(f);
  EXPECT_EQ(f.rule, FeasibilityRule::kCycle);
  EXPECT_EQ(f.witness.size(), 2u);

  Orientation starved = cyc;
  starved.direction[2] = -starved.direction[2];
  starved.direction[1] = -starved.direction[1];  // both parallel links from the source
  f = is_feasible(starved, n);
  EXPECT_FALSE(f);
  EXPECT_EQ(f.rule, FeasibilityRule::kStarvedNode);
  ASSERT_EQ(f.witness.size(), 1u);
  EXPECT_EQ(f.witness[0], 2u);
  EXPECT_FALSE(f.reason.empty());
}

TEST(IsFeasible, AgreesWithOracleOnAllTwoLoopPatterns) {
  Network n = load_network(test::data_path("two_loop.json"));
  std::size_t feasible = 0;
  for (std::uint64_t mask = 0; mask < 256; ++mask) {
    Orientation o;
    for (std::size_t j = 0; j < 8; ++j) o.direction.push_back((mask >> j) & 1 ? -1 : 1);
    const bool expected = test::oracle_feasible(n, o.direction);
    EXPECT_EQ(static_cast<bool>(is_feasible(o, n)), expected) << o.signature();
    feasible += expected;
  }
  EXPECT_EQ(feasible, 9u);
}

TEST(ExtractOrientation, SignsAndTieBreak) {
  Solution s;
  s.flows = {0.2, 0.1, 3e-8, -0.05, -5e-8};
  Orientation o = extract_orientation(s);
  EXPECT_EQ(o.direction, (std::vector<int>{1, 1, 1, -1, 1}));
  EXPECT_EQ(o.provenance, Provenance::kExtracted);
  EXPECT_EQ(o.signature(), "+++-+");
  EXPECT_EQ(Orientation::from_signature("+++-+"), o);
  s.flows[0] = -0.2;
  Orientation p = extract_orientation(s);
  std::size_t differing = 0;
  for (std::size_t j = 0; j < 5; ++j) differing += o.direction[j] != p.direction[j];
  EXPECT_EQ(differing, 1u);
}

}  // namespace
}  // namespace wdn
