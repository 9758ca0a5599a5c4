#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "test_support.hpp"
#include "wdn/driver.hpp"
#include "wdn/formulation.hpp"
#include "wdn/graph.hpp"
#include "wdn/solver.hpp"

namespace wdn {
namespace {

Network pair_network() {
  std::vector<Node> nodes{{"a", 0.0, 0.02, 10.0, false}, {"s", 50.0, 0.0, 0.0, true}};
  std::vector<Link> links(1);
  links[0].id = "L";
  links[0].endpoint_a = 1;
  links[0].endpoint_b = 0;
  links[0].length = 400.0;
  return Network::create("pair", nodes, links, {{0.15, 30.0, 120.0}, {0.3, 60.0, 120.0}}, 0.0, 0.2);
}

TEST(SolveStatus, RoundTrip) {
  for (auto s : {SolveStatus::kLocalOptimum, SolveStatus::kInfeasible, SolveStatus::kIterationLimit,
                 SolveStatus::kNumericalFailure}) {
    EXPECT_EQ(parse_solve_status(to_string(s)), s);
  }
}

TEST(BuiltinSolve, ZeroDemandFillsWithCheapestPipe) {
  Network n = test::make_network(4, {{0, 1}, {1, 2}, {2, 3}, {3, 1}}, 0.0);
  GraphStructures g = build_graph_structures(n);
  for (Formulation f : {Formulation::kDiscreteSegment, Formulation::kParallelLink}) {
    NlpModel m = build_model(n, g, f);
    std::vector<double> start = start_point(m, n, std::vector<double>(n.link_count(), 0.0));
    SolveOutcome out = solve(n, m, BuiltinSolver{}, start);
    ASSERT_EQ(out.status, SolveStatus::kLocalOptimum) << out.message;
    for (double q : out.solution->flows) EXPECT_LE(std::abs(q), 1e-6);
    // Cheapest catalog entry costs 10 per metre; 4 links of 100 m.
    EXPECT_NEAR(out.solution->cost, 10.0 * 400.0, 1e-3);
  }
}

TEST(BuiltinSolve, ReversedBridgeIsInfeasible) {
  Network n = pair_network();
  GraphStructures g = build_graph_structures(n);
  // Flow must run from the source into the demand node.
  const int toward_demand = n.link(0).head == n.source() ? -1 : 1;
  std::vector<int> reversed{-toward_demand};
  NlpModel m = build_oriented(n, g, reversed, Formulation::kDiscreteSegment);
  std::vector<double> start = start_point(m, n, std::vector<double>{0.0});
  SolveOutcome out = solve(n, m, BuiltinSolver{}, start);
  EXPECT_EQ(out.status, SolveStatus::kInfeasible);
  EXPECT_FALSE(out.solution);

  std::vector<int> forward{toward_demand};
  NlpModel ok = build_oriented(n, g, forward, Formulation::kDiscreteSegment);
  SolveOutcome good = solve(n, ok, BuiltinSolver{}, start_point(ok, n, std::vector<double>{0.0}));
  ASSERT_EQ(good.status, SolveStatus::kLocalOptimum) << good.message;
  EXPECT_TRUE(good.validation->feasible);
  EXPECT_NEAR(std::abs(good.solution->flows[0]), 0.02, 1e-7);
}

TEST(BuiltinSolve, StartOutsideBoundsIsProjected) {
  Network n = load_network(test::data_path("toy_cycle.json"));
  NlpModel m = build_ds(n, build_graph_structures(n));
  std::vector<double> start(m.variable_count(), 1e3);
  SolveOutcome out = solve(n, m, BuiltinSolver{}, start);
  EXPECT_NE(out.status, SolveStatus::kNumericalFailure) << out.message;
}

TEST(BuiltinSolve, IterationLimitIsReported) {
  Network n = load_network(test::data_path("two_loop.json"));
  NlpModel m = build_ds(n, build_graph_structures(n));
  SolverOptions opt;
  opt.max_iterations = 2;
  SolveOutcome out = solve(n, m, BuiltinSolver{}, start_point(m, n, run_start_flows(n, 3)), opt);
  EXPECT_EQ(out.status, SolveStatus::kIterationLimit);
  EXPECT_LE(out.iterations, 2u);
}

TEST(BuiltinSolve, ToyMatchesGridOracle) {
  Network n = load_network(test::data_path("toy_cycle.json"));
  const test::GridOptimum oracle = test::toy_grid_search(n);
  ASSERT_TRUE(std::isfinite(oracle.cost));
  DriverOptions opt;
  opt.workers = 4;
  RunReport r = multistart(n, Formulation::kDiscreteSegment, 10, BuiltinSolver{}, 1, opt);
  ASSERT_TRUE(r.aggregates.min_cost);
  EXPECT_LE(std::abs(*r.aggregates.min_cost - oracle.cost), 0.02 * oracle.cost)
      << "builtin " << *r.aggregates.min_cost << " oracle " << oracle.cost;
}

TEST(BuiltinSolve, TwoLoopWithinQualityBar) {
  Network n = load_network(test::data_path("two_loop.json"));
  DriverOptions opt;
  opt.workers = 4;
  RunReport r = multistart(n, Formulation::kDiscreteSegment, 4, BuiltinSolver{}, 1, opt);
  ASSERT_TRUE(r.aggregates.min_cost);
  EXPECT_LE(*r.aggregates.min_cost, 1.15 * 4.04e5);
  const RunRecord* best = best_run(r);
  ASSERT_NE(best, nullptr);
  EXPECT_TRUE(validate(n, *best->solution).feasible);
}

}  // namespace
}  // namespace wdn
