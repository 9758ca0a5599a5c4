#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "test_support.hpp"
#include "wdn/errors.hpp"
#include "wdn/formulation.hpp"
#include "wdn/graph.hpp"
#include "wdn/hydraulics.hpp"
#include "wdn/report.hpp"
#include "wdn/validation.hpp"

namespace wdn {
namespace {

Solution uniform_design(const Network& n, std::vector<double> flows, std::size_t pipe) {
  Solution s;
  s.flows = std::move(flows);
  s.segment_lengths = SegmentLengths(n.link_count(), n.pipe_count());
  for (std::size_t j = 0; j < n.link_count(); ++j) s.segment_lengths(j, pipe) = n.link(j).length;
  s.cost = network_cost(n, s.segment_lengths);
  return s;
}

Network pair_network(double flow_min) {
  std::vector<Node> nodes{{"a", 0.0, 0.02, 10.0, false}, {"s", 50.0, 0.0, 0.0, true}};
  std::vector<Link> links(1);
  links[0].id = "L";
  links[0].endpoint_a = 1;
  links[0].endpoint_b = 0;
  links[0].length = 400.0;
  return Network::create("pair", nodes, links, {{0.15, 30.0, 120.0}, {0.3, 60.0, 120.0}}, flow_min,
                         0.2);
}

TEST(Validate, TwoLoopFixtureIsFeasible) {
  Network n = load_network(test::data_path("two_loop.json"));
  Solution s = load_solution(n, test::data_path("two_loop_solution.json"));
  ValidationReport r = validate(n, s);
  EXPECT_TRUE(r.feasible) << render_validation(r);
  EXPECT_TRUE(r.violations.empty());
  EXPECT_NEAR(s.cost, 4.04e5, 0.005 * 4.04e5);
  for (std::size_t v = 0; v < n.node_count(); ++v) {
    EXPECT_GE(r.heads[v], n.node(v).elevation + n.node(v).min_pressure - 1e-4);
  }
}

TEST(Validate, PerturbedFlowBreaksConservationAtBothEnds) {
  Network n = load_network(test::data_path("two_loop.json"));
  Solution base = load_solution(n, test::data_path("two_loop_solution.json"));
  for (std::size_t j = 0; j < n.link_count(); ++j) {
    Solution s = base;
    s.flows[j] += 0.01;
    ValidationReport r = validate(n, s);
    EXPECT_FALSE(r.feasible);
    std::vector<std::string> where;
    for (const auto& v : r.violations) {
      if (v.family == "conservation") {
        where.push_back(v.location);
        EXPECT_NEAR(v.amount, 0.01, 1e-6);
      }
    }
    std::vector<std::string> expected{"node " + n.node(n.link(j).tail).id,
                                      "node " + n.node(n.link(j).head).id};
    std::sort(where.begin(), where.end());
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(where, expected) << n.link(j).id;
  }
}

TEST(Validate, ShapeMismatchIsDimensionError) {
  Network n = load_network(test::data_path("two_loop.json"));
  Solution s = uniform_design(n, std::vector<double>(n.link_count(), 0.0), 0);
  s.flows.pop_back();
  EXPECT_THROW(validate(n, s), DimensionError);
}

TEST(ComputeHeads, ZeroFlowGivesSourceElevation) {
  Network n = load_network(test::data_path("hanoi.json"));
  Solution s = uniform_design(n, std::vector<double>(n.link_count(), 0.0), 0);
  HeadComputation h = compute_heads(n, s);
  for (double head : h.heads) EXPECT_EQ(head, n.node(n.source()).elevation);
  EXPECT_EQ(h.max_path_discrepancy, 0.0);
}

TEST(ComputeHeads, SinglePipe) {
  Network n = pair_network(0.0);
  const std::size_t a = n.source() == 0 ? 1 : 0;
  const double q = 0.02;
  // Positive flow runs tail to head; the flow here runs from s to a.
  const double signed_q = n.link(0).head == a ? q : -q;
  Solution s = uniform_design(n, {signed_q}, 1);
  HeadComputation h = compute_heads(n, s);
  const double expected = 50.0 - 10.68 * 400.0 * std::pow(q, 1.852) /
                                     (std::pow(120.0, 1.852) * std::pow(0.3, 4.87));
  EXPECT_NEAR(h.heads[a], expected, 1e-9);
  EXPECT_EQ(h.heads[n.source()], 50.0);
  EXPECT_TRUE(validate(n, s).feasible);
}

TEST(Validate, SourceRowIsLinearlyDependent) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (const char* f : {"two_loop.json", "hanoi.json", "toy_cycle.json"}) {
    Network n = load_network(test::data_path(f));
    for (int k = 0; k < 20; ++k) {
      std::vector<double> q(n.link_count());
      for (double& v : q) v = noise(rng);
      EXPECT_LE(validate(n, uniform_design(n, q, 0)).source_balance_gap, 1e-10) << f;
    }
  }
}

TEST(Validate, ResidualsMatchModelAwayFromSmoothing) {
  // Cycle residuals from the validator's own headloss against the DS model
  // rows, for flows well outside the smoothing band.
  std::mt19937_64 rng(4);
  for (const char* f : {"two_loop.json", "hanoi.json"}) {
    Network n = load_network(test::data_path(f));
    GraphStructures g = build_graph_structures(n);
    NlpModel m = build_ds(n, g);
    std::uniform_real_distribution<double> mag(1e-4, 0.5), frac(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
      Solution s = uniform_design(n, std::vector<double>(n.link_count()), 0);
      for (std::size_t j = 0; j < n.link_count(); ++j) {
        s.flows[j] = (frac(rng) < 0.5 ? -1 : 1) * mag(rng) * n.flow_max();
        double rest = n.link(j).length;
        for (std::size_t p = 0; p + 1 < n.pipe_count(); ++p) {
          s.segment_lengths(j, p) = frac(rng) * rest;
          rest -= s.segment_lengths(j, p);
        }
        s.segment_lengths(j, n.pipe_count() - 1) = rest;
      }
      std::vector<double> x = point_from_solution(m, s);
      std::size_t cycle = 0;
      for (std::size_t i = 0; i < m.constraint_count(); ++i) {
        if (m.constraint(i).family != ConstraintFamily::kCycle) continue;
        double sum = 0.0;
        for (const auto& step : g.cycles.cycles[cycle]) sum += step.sign * link_headloss(n, s, step.link);
        EXPECT_NEAR(m.residual(i, x), sum, 1e-9 * std::max(1.0, std::abs(sum))) << f;
        ++cycle;
      }
      EXPECT_EQ(cycle, g.cycles.cycles.size());
    }
  }
}

TEST(Validate, FlowBelowMinimumFlagged) {
  Network n = pair_network(0.005);
  const double sign = n.link(0).head == n.source() ? -1.0 : 1.0;
  // The demand node needs 0.02, so this is also a conservation failure; only
  // the flow-range family is of interest here.
  ValidationReport low = validate(n, uniform_design(n, {sign * 0.002}, 1));
  EXPECT_GT(low.family("flow_range").worst, 0.0029);
  ValidationReport zero = validate(n, uniform_design(n, {0.0}, 1));
  EXPECT_EQ(zero.family("flow_range").worst, 0.0);
  ValidationReport ok = validate(n, uniform_design(n, {sign * 0.02}, 1));
  EXPECT_TRUE(ok.feasible) << render_validation(ok);
  Network free = pair_network(0.0);
  EXPECT_EQ(validate(free, uniform_design(free, {sign * 0.002}, 1)).family("flow_range").worst, 0.0);
}

TEST(Validate, ComplementarityAndCost) {
  Network n = pair_network(0.0);
  const double sign = n.link(0).head == n.source() ? -1.0 : 1.0;
  Solution s = uniform_design(n, {sign * 0.02}, 1);
  s.forward_flows = std::vector<double>{sign > 0 ? 0.021 : 0.001};
  s.reverse_flows = std::vector<double>{sign > 0 ? 0.001 : 0.021};
  ValidationReport r = validate(n, s);
  EXPECT_NEAR(r.family("complementarity").worst, 0.021 * 0.001, 1e-12);
  EXPECT_FALSE(r.feasible);
  Solution c = uniform_design(n, {sign * 0.02}, 1);
  c.cost *= 1.01;
  EXPECT_FALSE(validate(n, c).feasible);
}

TEST(Validate, VerdictMatchesFamilies) {
  Network n = load_network(test::data_path("two_loop.json"));
  Solution s = load_solution(n, test::data_path("two_loop_solution.json"));
  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise(0.0, 1e-5);
  for (int k = 0; k < 50; ++k) {
    Solution t = s;
    for (double& q : t.flows) q += noise(rng);
    ValidationReport r = validate(n, t);
    bool all_ok = true;
    for (const auto& f : r.families) all_ok = all_ok && f.ok();
    EXPECT_EQ(r.feasible, all_ok);
  }
}

}  // namespace
}  // namespace wdn
