#include "wdn/driver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <thread>

#include "wdn/errors.hpp"
#include "wdn/graph.hpp"
#include "wdn/orientation.hpp"

namespace wdn {

namespace {

// Calls task(i) for i in [0, count) on up to `workers` threads. Each task
// writes only its own slot, so results come out in index order.
void for_each_run(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& task) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
  }
}

RunRecord run_once(const Network& network, const NlpModel& model, const SolverAdapter& adapter,
                   std::span<const double> start, std::size_t run_index, std::uint64_t seed,
                   std::string formulation, const DriverOptions& options) {
  RunRecord record;
  record.run_index = run_index;
  record.seed = seed;
  record.formulation = std::move(formulation);
  SolverOptions solver = options.solver;
  solver.seed = seed;
  try {
    SolveOutcome outcome = solve(network, model, adapter, start, solver, options.tolerances);
    record.status = outcome.status;
    record.time = outcome.wall_time;
    record.iterations = outcome.iterations;
    record.message = outcome.message;
    if (outcome.solution) {
      outcome.solution->formulation = record.formulation;
      outcome.solution->seed = seed;
      outcome.solution->run_index = run_index;
      record.cost = outcome.solution->cost;
      record.orientation =
          extract_orientation(*outcome.solution, options.zero_flow_tolerance).signature();
      record.solution = std::move(outcome.solution);
    }
  } catch (const AdapterError& e) {
    record.status = SolveStatus::kNumericalFailure;
    record.message = std::string("adapter error: ") + e.what();
  }
  return record;
}

RunReport empty_report(const Network& network, std::string pipeline, std::uint64_t seed,
                       const SolverAdapter& adapter) {
  RunReport report;
  report.network = network.name();
  report.link_count = network.link_count();
  report.pipeline = std::move(pipeline);
  report.seed = seed;
  report.adapter = adapter.name();
  return report;
}

}  // namespace

std::uint64_t run_seed(std::uint64_t batch_seed, std::size_t run_index) {
  std::uint64_t z = batch_seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(run_index) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<double> run_start_flows(const Network& network, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_conserving_flows(network, rng);
}

Aggregates aggregate(std::span<const RunRecord> runs, std::size_t link_count) {
  Aggregates agg;
  agg.runs = runs.size();
  std::vector<double> costs;
  std::set<std::string> orientations;
  for (const auto& r : runs) {
    agg.total_time += r.time;
    if (!r.succeeded() || !r.cost) continue;
    costs.push_back(*r.cost);
    orientations.insert(r.orientation);
  }
  agg.successes = costs.size();
  agg.distinct_orientations = orientations.size();
  if (costs.empty()) return agg;

  double sum = 0.0;
  for (double c : costs) sum += c;
  const double mean = sum / static_cast<double>(costs.size());
  double sq = 0.0;
  for (double c : costs) sq += (c - mean) * (c - mean);
  agg.min_cost = *std::min_element(costs.begin(), costs.end());
  agg.avg_cost = mean;
  agg.std_cost = std::sqrt(sq / static_cast<double>(costs.size()));

  const std::string& first = *orientations.begin();
  for (std::size_t i = 0; i < link_count && i < first.size(); ++i) {
    bool same = std::all_of(orientations.begin(), orientations.end(),
                            [&](const std::string& s) { return s[i] == first[i]; });
    if (same) ++agg.common_links;
  }
  return agg;
}

RunReport multistart(const Network& network, Formulation formulation, std::size_t runs,
                     const SolverAdapter& adapter, std::uint64_t seed,
                     const DriverOptions& options) {
  if (runs == 0) throw std::invalid_argument("multistart needs at least one run");
  const std::string tag(to_string(formulation));
  RunReport report = empty_report(network, tag, seed, adapter);
  const GraphStructures graphs = build_graph_structures(network);
  const NlpModel model = build_model(network, graphs, formulation, options.formulation);

  report.runs.resize(runs);
  for_each_run(runs, options.workers, [&](std::size_t i) {
    const std::uint64_t s = run_seed(seed, i);
    const std::vector<double> x0 = start_point(model, network, run_start_flows(network, s));
    report.runs[i] = run_once(network, model, adapter, x0, i, s, tag, options);
  });
  report.aggregates = aggregate(report.runs, network.link_count());
  return report;
}

RunReport resolve_pipeline(const RunReport& source, const Network& network,
                           const SolverAdapter& adapter, const DriverOptions& options,
                           const ResolveOptions& resolve) {
  // Source runs per orientation, orientations in signature order.
  std::map<std::string, std::vector<const RunRecord*>> groups;
  for (const auto& r : source.runs) {
    if (r.succeeded() && !r.orientation.empty()) groups[r.orientation].push_back(&r);
  }
  if (groups.empty()) throw std::invalid_argument("source report has no successful run");

  RunReport report = empty_report(network, "rs", source.seed, adapter);
  const GraphStructures graphs = build_graph_structures(network);

  struct Job {
    const NlpModel* model;
    const RunRecord* origin;
  };
  std::vector<NlpModel> models;
  models.reserve(groups.size());
  std::vector<Job> jobs;
  for (const auto& [signature, origins] : groups) {
    const Orientation o = Orientation::from_signature(signature, Provenance::kExtracted);
    models.push_back(build_oriented(network, graphs, o.direction, Formulation::kDiscreteSegment,
                                    options.formulation));
    for (const RunRecord* origin : origins) jobs.push_back({&models.back(), origin});
  }

  // Distinct stream from the source batch, which used the same batch seed.
  const std::uint64_t batch = run_seed(source.seed, static_cast<std::size_t>(-1));
  report.runs.resize(jobs.size());
  for_each_run(jobs.size(), options.workers, [&](std::size_t i) {
    const Job& job = jobs[i];
    const std::uint64_t s = run_seed(batch, i);
    std::vector<double> x0;
    if (resolve.warm_start && job.origin->solution) {
      x0 = point_from_solution(*job.model, *job.origin->solution);
    } else {
      x0 = start_point(*job.model, network, run_start_flows(network, s));
    }
    report.runs[i] = run_once(network, *job.model, adapter, x0, i, s, "rs-ds", options);
  });
  report.aggregates = aggregate(report.runs, network.link_count());
  return report;
}

RunReport orientation_search_pipeline(const Network& network,
                                      std::optional<std::size_t> sample_budget,
                                      const SolverAdapter& adapter, std::uint64_t seed,
                                      const DriverOptions& options) {
  RunReport report = empty_report(network, "os", seed, adapter);
  EnumerationOptions enumeration;
  enumeration.sample_budget = sample_budget;
  enumeration.seed = seed;
  const OrientationSet set = enumerate_orientations(reduce_graph(network), enumeration);
  report.feasible_orientations = set.orientations.size();
  if (sample_budget) report.orientation_draws = set.draws;
  if (set.orientations.empty()) {
    report.status = "empty-orientation-set";
    report.aggregates = aggregate(report.runs, network.link_count());
    return report;
  }

  const GraphStructures graphs = build_graph_structures(network);
  std::vector<NlpModel> models;
  models.reserve(set.orientations.size());
  for (const auto& o : set.orientations) {
    models.push_back(build_oriented(network, graphs, o.direction, Formulation::kDiscreteSegment,
                                    options.formulation));
  }
  report.runs.resize(models.size());
  for_each_run(models.size(), options.workers, [&](std::size_t i) {
    const std::uint64_t s = run_seed(seed, i);
    const std::vector<double> x0 = start_point(models[i], network, run_start_flows(network, s));
    report.runs[i] = run_once(network, models[i], adapter, x0, i, s, "os-ds", options);
  });
  report.aggregates = aggregate(report.runs, network.link_count());
  return report;
}

const RunRecord* best_run(const RunReport& report) {
  const RunRecord* best = nullptr;
  for (const auto& r : report.runs) {
    if (r.succeeded() && r.cost && (!best || *r.cost < *best->cost)) best = &r;
  }
  return best;
}

}  // namespace wdn
