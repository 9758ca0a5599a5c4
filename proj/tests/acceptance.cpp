// Acceptance suite: one PASS/FAIL/SKIP line per criterion. Criteria that need
// an Ipopt-class solver read the library path from WDN_OPT_IPOPT_LIBRARY and
// are skipped when it is unset. Any FAIL gives a non-zero exit code.
//
// Usage: acceptance [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "test_support.hpp"
#include "wdn/config.hpp"
#include "wdn/driver.hpp"
#include "wdn/formulation.hpp"
#include "wdn/graph.hpp"
#include "wdn/orientation.hpp"
#include "wdn/report.hpp"
#include "wdn/validation.hpp"

namespace wdn {
namespace {

enum class Verdict { kPass, kFail, kSkip };

struct Outcome {
  Verdict verdict = Verdict::kFail;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  std::function<Outcome()> run;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel_diff(double value, double reference) { return std::abs(value - reference) / std::abs(reference); }

std::size_t batch_workers() { return std::max(4u, std::thread::hardware_concurrency()); }

Network fixture(const char* name) { return load_network(test::data_path(name)); }

// Ipopt adapter from the environment, or nothing (criterion skipped).
std::unique_ptr<SolverAdapter> external_adapter(std::string& why) {
  const char* lib = std::getenv(kEnvIpoptLibrary);
  if (!lib || !*lib) {
    why = std::string(kEnvIpoptLibrary) + " not set";
    return nullptr;
  }
  Config c;
  c.ipopt_library = lib;
  return make_adapter("external:ipopt", c);
}

// Feasible solutions produced by criteria 8-10 with their network file,
// re-examined by criterion 11.
std::vector<std::pair<std::string, Solution>> g_produced;

void keep_successes(const std::string& file, const RunReport& r) {
  for (const auto& run : r.runs) {
    if (run.succeeded() && run.solution) g_produced.emplace_back(file, *run.solution);
  }
}

// --- criteria ---------------------------------------------------------------

Outcome c1_two_loop_pl() {
  std::string why;
  auto adapter = external_adapter(why);
  if (!adapter) return {Verdict::kSkip, why};
  Network n = fixture("two_loop.json");
  RunReport r = multistart(n, Formulation::kParallelLink, 100, *adapter, 1);
  if (!r.aggregates.min_cost) return {Verdict::kFail, "no successful run"};
  const double d = rel_diff(*r.aggregates.min_cost, 4.04e5);
  return {d <= 0.01 ? Verdict::kPass : Verdict::kFail,
          fmt("min=%.0f (%.2f%% from 4.04e5, limit 1%%), %zu/100 ok", *r.aggregates.min_cost, 100 * d,
              r.aggregates.successes)};
}

Outcome c2_hanoi_pl() {
  std::string why;
  auto adapter = external_adapter(why);
  if (!adapter) return {Verdict::kSkip, why};
  Network n = fixture("hanoi.json");
  RunReport r = multistart(n, Formulation::kParallelLink, 100, *adapter, 1);
  const Aggregates& a = r.aggregates;
  if (!a.min_cost) return {Verdict::kFail, "no successful run"};
  const double dmin = rel_diff(*a.min_cost, 6.06e6), davg = rel_diff(*a.avg_cost, 6.18e6),
               dstd = rel_diff(*a.std_cost, 0.95e5);
  const bool ok = dmin <= 0.01 && davg <= 0.10 && dstd <= 0.50;
  return {ok ? Verdict::kPass : Verdict::kFail,
          fmt("min=%.4fe6 (%.2f%%, limit 1%%) avg=%.4fe6 (%.2f%%, limit 10%%) std=%.3fe5 (%.1f%%, "
              "limit 50%%), %zu/100 ok",
              *a.min_cost / 1e6, 100 * dmin, *a.avg_cost / 1e6, 100 * davg, *a.std_cost / 1e5, 100 * dstd,
              a.successes)};
}

Outcome c3_rs_vs_ds() {
  std::string why;
  auto adapter = external_adapter(why);
  if (!adapter) return {Verdict::kSkip, why};
  bool ok = true;
  std::ostringstream detail;
  for (const char* file : {"two_loop.json", "hanoi.json"}) {
    Network n = fixture(file);
    for (std::uint64_t seed : {1, 2, 3}) {
      RunReport ds = multistart(n, Formulation::kDiscreteSegment, 100, *adapter, seed);
      if (!ds.aggregates.avg_cost) {
        ok = false;
        detail << n.name() << "/" << seed << ": no DS success; ";
        continue;
      }
      RunReport rs = resolve_pipeline(ds, n, *adapter);
      const bool pass = rs.aggregates.avg_cost && *rs.aggregates.avg_cost <= *ds.aggregates.avg_cost;
      ok = ok && pass;
      detail << n.name() << "/" << seed
             << fmt(": RS avg %.5g %s DS avg %.5g; ", rs.aggregates.avg_cost.value_or(NAN), pass ? "<=" : ">",
                    *ds.aggregates.avg_cost);
    }
  }
  return {ok ? Verdict::kPass : Verdict::kFail, detail.str()};
}

Outcome c4_two_loop_orientations() {
  Network n = fixture("two_loop.json");
  const auto t0 = Clock::now();
  OrientationSet s = enumerate_orientations(reduce_graph(n));
  const double t = seconds_since(t0);
  const bool ok = s.exhaustive && s.orientations.size() == 9 && t < 1.0;
  return {ok ? Verdict::kPass : Verdict::kFail,
          fmt("%zu feasible orientations (expected 9) in %.3f s (limit 1 s)", s.orientations.size(), t)};
}

Outcome c5_sp_sampling() {
  Network n = fixture("sp_synthetic.json");
  if (n.node_count() < 140) return {Verdict::kFail, "synthetic SP fixture has fewer than 140 nodes"};
  bool ok = true;
  std::ostringstream detail;
  detail << n.node_count() << " nodes, " << n.link_count() << " links;";
  for (std::uint64_t seed : {1, 2, 3}) {
    // No orientation, so no solve: the built-in adapter is never called.
    RunReport r = orientation_search_pipeline(n, 100, BuiltinSolver{}, seed);
    const std::size_t found = r.feasible_orientations.value_or(0);
    ok = ok && found == 0 && r.status == "empty-orientation-set";
    detail << " seed " << seed << ": " << found << " feasible of " << r.orientation_draws.value_or(0)
           << " draws;";
  }
  return {ok ? Verdict::kPass : Verdict::kFail, detail.str()};
}

Outcome c6_gradients() {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  std::size_t points = 0, models = 0;
  std::set<ConstraintFamily> families;
  for (const char* file : {"toy_cycle.json", "two_loop.json", "hanoi.json"}) {
    Network n = fixture(file);
    GraphStructures g = build_graph_structures(n);
    std::vector<NlpModel> built{build_ds(n, g), build_pl(n, g)};
    OrientationSet os = enumerate_orientations(reduce_graph(n), {.sample_budget = 5, .seed = 3});
    for (const auto& o : os.orientations) {
      built.push_back(build_oriented(n, g, o.direction, Formulation::kDiscreteSegment));
      built.push_back(build_oriented(n, g, o.direction, Formulation::kParallelLink));
      break;
    }
    for (const NlpModel& m : built) {
      ++models;
      for (const auto& c : m.constraints()) families.insert(c.family);
      for (int k = 0; k < 20; ++k, ++points) {
        std::vector<double> x(m.variable_count());
        std::uniform_real_distribution<double> u(0.02, 0.98);
        for (std::size_t j = 0; j < x.size(); ++j) {
          const Variable& v = m.variables()[j];
          x[j] = v.lower + u(rng) * (v.upper - v.lower);
        }
        worst = std::max(worst, test::jacobian_gap(m, x));
      }
    }
  }
  const bool ok = worst <= 1e-5 && families.size() == 5;
  return {ok ? Verdict::kPass : Verdict::kFail,
          fmt("worst relative gap %.2e (limit 1e-5) over %zu points on %zu models, %zu constraint families",
              worst, points, models, families.size())};
}

Outcome c7_orientation_oracle() {
  const auto t0 = Clock::now();
  std::size_t graphs = 0, mismatches = 0;
  auto check = [&](const Network& n) {
    if (n.link_count() > 12) return;
    ++graphs;
    OrientationSet s = enumerate_orientations(reduce_graph(n));
    std::set<std::vector<int>> got;
    for (const auto& o : s.orientations) got.insert(o.direction);
    if (!s.exhaustive || got.size() != s.orientations.size() || got != test::brute_force(n)) ++mismatches;
  };
  for (const char* file : {"toy_cycle.json", "two_loop.json", "tree.json", "hanoi.json", "sp_synthetic.json"}) {
    check(fixture(file));
  }
  for (const auto& g : test::small_graphs()) check(test::make_network(g.nodes, g.edges));
  const double t = seconds_since(t0);
  const bool ok = mismatches == 0 && graphs > 0 && t < 10.0;
  return {ok ? Verdict::kPass : Verdict::kFail,
          fmt("%zu graphs with <= 12 links, %zu mismatches, %.2f s (limit 10 s)", graphs, mismatches, t)};
}

Outcome c8_toy_oracle() {
  const auto t0 = Clock::now();
  Network n = fixture("toy_cycle.json");
  const test::GridOptimum oracle = test::toy_grid_search(n, 1e-3, 1.0);
  DriverOptions opt;
  opt.workers = batch_workers();
  RunReport r = multistart(n, Formulation::kDiscreteSegment, 10, BuiltinSolver{}, 1, opt);
  keep_successes("toy_cycle.json", r);
  const double t = seconds_since(t0);
  if (!r.aggregates.min_cost) return {Verdict::kFail, "no successful builtin run"};
  const double d = rel_diff(*r.aggregates.min_cost, oracle.cost);
  const bool ok = d <= 0.02 && t < 60.0;
  return {ok ? Verdict::kPass : Verdict::kFail,
          fmt("builtin %.1f vs grid oracle %.1f (%.3f%%, limit 2%%), %.1f s (limit 60 s)", *r.aggregates.min_cost,
              oracle.cost, 100 * d, t)};
}

Outcome c9_literature_fixture() {
  Network n = fixture("two_loop.json");
  Solution s = load_solution(n, test::data_path("two_loop_solution.json"));
  ValidationReport v = validate(n, s);
  const double d = rel_diff(s.cost, 4.04e5);
  if (v.feasible) g_produced.emplace_back("two_loop.json", s);
  const bool ok = v.feasible && d <= 0.005;
  return {ok ? Verdict::kPass : Verdict::kFail,
          fmt("%s, cost %.0f (%.3f%% from 4.04e5, limit 0.5%%)", v.feasible ? "feasible" : "infeasible", s.cost,
              100 * d)};
}

Outcome c10_ds_pl_correspondence() {
  bool ok = true;
  std::ostringstream detail;
  DriverOptions opt;
  opt.workers = batch_workers();
  for (auto [file, runs] : {std::pair{"toy_cycle.json", 20}, std::pair{"two_loop.json", 10}}) {
    Network n = fixture(file);
    GraphStructures g = build_graph_structures(n);
    NlpModel ds = build_ds(n, g);
    RunReport r = multistart(n, Formulation::kParallelLink, static_cast<std::size_t>(runs), BuiltinSolver{}, 1, opt);
    keep_successes(file, r);
    double worst = 0.0;
    for (const auto& run : r.runs) {
      if (!run.succeeded()) continue;
      std::vector<double> x = point_from_solution(ds, *run.solution);
      for (std::size_t i = 0; i < ds.constraint_count(); ++i) worst = std::max(worst, ds.violation(i, x));
    }
    const bool pass = r.aggregates.successes > 0 && worst <= 1e-6;
    ok = ok && pass;
    detail << n.name() << fmt(": %zu/%d PL runs ok, worst DS residual %.2e (limit 1e-6); ",
                              r.aggregates.successes, runs, worst);
  }
  return {ok ? Verdict::kPass : Verdict::kFail, detail.str()};
}

Outcome c11_path_independence() {
  if (g_produced.empty()) return {Verdict::kFail, "no solutions from criteria 8-10"};
  std::size_t checked = 0, failed = 0, alternatives = 0;
  double worst = 0.0;
  for (const auto& [file, s] : g_produced) {
    Network n = fixture(file.c_str());
    const std::size_t cycles = build_cycle_basis(n, build_spanning_tree(n)).cycles.size();
    HeadComputation h = compute_heads(n, s);
    alternatives += h.alternative_paths;
    worst = std::max(worst, h.max_path_discrepancy);
    const bool pass = validate(n, s).family("path_independence").ok() &&
                      h.max_path_discrepancy <= static_cast<double>(cycles) * Tolerances{}.cycle;
    failed += !pass;
    ++checked;
  }
  const bool ok = failed == 0 && alternatives > 0;
  return {ok ? Verdict::kPass : Verdict::kFail,
          fmt("%zu solutions, %zu alternative paths, worst discrepancy %.2e m, %zu failures", checked, alternatives,
              worst, failed)};
}

Outcome c12_determinism() {
  constexpr std::size_t kParallelWorkers = 4;
  const ReportFormat f{.include_timing = false};
  std::size_t compared = 0, differing = 0;
  auto compare = [&](const std::function<RunReport(std::size_t workers)>& batch) {
    ++compared;
    const std::string a = write_report(batch(1), f);
    const std::string b = write_report(batch(kParallelWorkers), f);
    const std::string c = write_report(batch(kParallelWorkers), f);
    differing += !(a == b && b == c);
  };
  auto opts = [](std::size_t w) {
    DriverOptions o;
    o.workers = w;
    return o;
  };
  Network toy = fixture("toy_cycle.json");
  Network two = fixture("two_loop.json");
  compare([&](std::size_t w) { return multistart(toy, Formulation::kDiscreteSegment, 8, BuiltinSolver{}, 3, opts(w)); });
  compare([&](std::size_t w) { return multistart(toy, Formulation::kParallelLink, 8, BuiltinSolver{}, 3, opts(w)); });
  compare([&](std::size_t w) {
    RunReport src = multistart(toy, Formulation::kDiscreteSegment, 8, BuiltinSolver{}, 5, opts(w));
    return resolve_pipeline(src, toy, BuiltinSolver{}, opts(w));
  });
  compare([&](std::size_t w) { return orientation_search_pipeline(two, std::nullopt, BuiltinSolver{}, 3, opts(w)); });
  return {differing == 0 ? Verdict::kPass : Verdict::kFail,
          fmt("%zu batch kinds run three times each (1 and %zu workers), %zu differ", compared, kParallelWorkers,
              differing)};
}

}  // namespace
}  // namespace wdn

int main(int argc, char** argv) {
  using namespace wdn;
  const std::vector<Criterion> criteria{
      {1, "[EXT] Two-loop PL 100 runs, min cost within 1% of 4.04e5", c1_two_loop_pl},
      {2, "[EXT] Hanoi PL 100 runs, min/avg/std against 6.06e6/6.18e6/0.95e5", c2_hanoi_pl},
      {3, "[EXT] RS avg <= DS avg on Two-loop and Hanoi, 3 seeds", c3_rs_vs_ds},
      {4, "Two-loop has exactly 9 feasible orientations, < 1 s", c4_two_loop_orientations},
      {5, "Sampling (budget 100) finds 0 feasible orientations on the synthetic SP network, 3 seeds",
       c5_sp_sampling},
      {6, "Analytic Jacobians match central differences to 1e-5, >= 20 points per model", c6_gradients},
      {7, "Exhaustive enumeration equals brute force on graphs with <= 12 links, < 10 s", c7_orientation_oracle},
      {8, "Builtin toy optimum within 2% of the grid-search oracle, < 60 s", c8_toy_oracle},
      {9, "Two-loop split-pipe fixture validates, cost within 0.5% of 4.04e5", c9_literature_fixture},
      {10, "Mapped PL solutions meet all DS residuals within 1e-6 (toy, Two-loop)", c10_ds_pl_correspondence},
      {11, "Heads are path independent on every solution from criteria 8-10", c11_path_independence},
      {12, "Repeated builtin batches give byte-identical reports", c12_determinism},
  };

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  if (selected.contains(11)) selected.insert({8, 9, 10});

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.contains(c.id)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Verdict::kFail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.verdict == Verdict::kPass ? "PASS" : o.verdict == Verdict::kFail ? "FAIL" : "SKIP";
    failures += o.verdict == Verdict::kFail;
    std::printf("[%s] criterion %2d: %s | %s | %.1f s\n", tag, c.id, c.title.c_str(), o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
