#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wdn/formulation.hpp"
#include "wdn/network.hpp"
#include "wdn/solution.hpp"
#include "wdn/solver.hpp"
#include "wdn/validation.hpp"

namespace wdn {

inline constexpr int kReportSchemaVersion = 1;

/// One solve of a batch.
struct RunRecord {
  std::size_t run_index = 0;
  std::uint64_t seed = 0;
  std::string formulation;  // "ds", "pl", "os-ds", "rs-ds"
  SolveStatus status = SolveStatus::kNumericalFailure;
  std::optional<double> cost;  // successful runs only
  std::string orientation;     // signature of the extracted orientation, successful runs only
  double time = 0.0;           // wall-clock seconds
  std::size_t iterations = 0;
  std::string message;
  /// Validated design of a successful run. Kept in memory, not serialized.
  std::optional<Solution> solution;

  bool succeeded() const { return status == SolveStatus::kLocalOptimum; }
};

struct Aggregates {
  std::size_t runs = 0;
  std::size_t successes = 0;
  std::optional<double> min_cost;
  std::optional<double> avg_cost;
  std::optional<double> std_cost;  // population standard deviation
  std::size_t distinct_orientations = 0;
  /// Links whose direction is the same in every successful run.
  std::size_t common_links = 0;
  double total_time = 0.0;  // sum of per-run wall-clock times

  bool operator==(const Aggregates&) const = default;
};

Aggregates aggregate(std::span<const RunRecord> runs, std::size_t link_count);

struct RunReport {
  int schema_version = kReportSchemaVersion;
  std::string network;
  std::size_t link_count = 0;
  std::string pipeline;  // "ds", "pl", "os" or "rs"
  std::uint64_t seed = 0;
  std::string adapter;
  std::vector<RunRecord> runs;  // ordered by run index
  Aggregates aggregates;
  /// Orientation search only: size of the enumerated or sampled set.
  std::optional<std::size_t> feasible_orientations;
  std::optional<std::size_t> orientation_draws;
  std::string status = "ok";  // or "empty-orientation-set"
};

struct DriverOptions {
  SolverOptions solver;
  Tolerances tolerances;
  FormulationOptions formulation;
  std::size_t workers = 1;
  double zero_flow_tolerance = 1e-7;  // m^3/s, orientation extraction
};

/// Seed of run `run_index` in a batch seeded with `batch_seed` (splitmix64).
std::uint64_t run_seed(std::uint64_t batch_seed, std::size_t run_index);

/// Start flows of one run: a random conservation-respecting flow pattern
/// drawn from the run seed. DS and PL runs with the same seed start alike.
std::vector<double> run_start_flows(const Network& network, std::uint64_t seed);

/// `runs` solves of the DS or PL model from randomized starts.
RunReport multistart(const Network& network, Formulation formulation, std::size_t runs,
                     const SolverAdapter& adapter, std::uint64_t seed,
                     const DriverOptions& options = {});

struct ResolveOptions {
  /// Start each re-solve from its source run's solution instead of a fresh
  /// random point.
  bool warm_start = false;
};

/// Re-solves every distinct orientation extracted from the successful runs
/// of `source`, once per occurrence, with DS flow signs fixed. Throws
/// std::invalid_argument if `source` has no successful run.
RunReport resolve_pipeline(const RunReport& source, const Network& network,
                           const SolverAdapter& adapter, const DriverOptions& options = {},
                           const ResolveOptions& resolve = {});

/// Solves the orientation-fixed DS model once per orientation found by
/// orientation search (exhaustive when `sample_budget` is empty). An empty
/// orientation set gives status "empty-orientation-set" and no runs.
RunReport orientation_search_pipeline(const Network& network,
                                      std::optional<std::size_t> sample_budget,
                                      const SolverAdapter& adapter, std::uint64_t seed,
                                      const DriverOptions& options = {});

/// The run with the lowest cost, if any succeeded.
const RunRecord* best_run(const RunReport& report);

}  // namespace wdn
