#include "wdn/solver.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "wdn/errors.hpp"
#include "wdn/formulation.hpp"

namespace wdn {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kLocalOptimum: return "LocalOptimum";
    case SolveStatus::kInfeasible: return "Infeasible";
    case SolveStatus::kIterationLimit: return "IterationLimit";
    case SolveStatus::kNumericalFailure: return "NumericalFailure";
  }
  return "NumericalFailure";
}

SolveStatus parse_solve_status(std::string_view text) {
  for (auto s : {SolveStatus::kLocalOptimum, SolveStatus::kInfeasible, SolveStatus::kIterationLimit,
                 SolveStatus::kNumericalFailure}) {
    if (to_string(s) == text) return s;
  }
  throw ParseError("unknown solve status '" + std::string(text) + "'");
}

namespace {

AdapterResult run_adapter(const SolverAdapter& adapter, const NlpModel& model,
                          std::span<const double> start, const SolverOptions& options) {
  try {
    return adapter.solve(model, start, options);
  } catch (const AdapterError&) {
    throw;
  } catch (const std::exception& e) {
    throw AdapterError(adapter.name() + ": " + e.what());
  }
}

NlpModel with_complementarity_delta(const NlpModel& model, double delta) {
  NlpModel tightened = model;
  for (std::size_t i = 0; i < tightened.constraint_count(); ++i) {
    const Constraint& c = tightened.constraint(i);
    if (c.family == ConstraintFamily::kComplementarity) tightened.set_constraint_bounds(i, c.lower, delta);
  }
  tightened.set_complementarity_delta(delta);
  return tightened;
}

// Both directions of some link carry flow.
bool both_directions_used(const Solution& solution) {
  if (!solution.forward_flows || !solution.reverse_flows) return false;
  for (std::size_t i = 0; i < solution.forward_flows->size(); ++i) {
    if (std::min((*solution.forward_flows)[i], (*solution.reverse_flows)[i]) > kBothDirectionsThreshold) {
      return true;
    }
  }
  return false;
}

}  // namespace

SolveOutcome solve(const Network& network, const NlpModel& model, const SolverAdapter& adapter,
                   std::span<const double> start, const SolverOptions& options,
                   const Tolerances& tolerances) {
  if (start.size() != model.variable_count()) {
    throw DimensionError("start point has " + std::to_string(start.size()) + " entries, model has " +
                         std::to_string(model.variable_count()) + " variables");
  }
  auto begin = std::chrono::steady_clock::now();
  std::vector<double> x0(start.begin(), start.end());
  project_to_bounds(model, x0);

  SolveOutcome outcome;
  outcome.complementarity_delta = model.complementarity_delta();
  AdapterResult raw = run_adapter(adapter, model, x0, options);
  outcome.iterations = raw.iterations;

  auto accept = [&](const NlpModel& m, const AdapterResult& r) {
    Solution s = solution_from_point(network, m, r.x);
    ValidationReport report = validate(network, s, tolerances);
    return std::make_pair(std::move(s), std::move(report));
  };

  outcome.status = raw.status;
  outcome.message = raw.message;
  if (raw.status == SolveStatus::kLocalOptimum) {
    auto [solution, report] = accept(model, raw);
    if (!report.feasible && model.formulation() == Formulation::kParallelLink &&
        both_directions_used(solution)) {
      NlpModel tight = with_complementarity_delta(model, kTightComplementarityDelta);
      AdapterResult again = run_adapter(adapter, tight, raw.x, options);
      outcome.iterations += again.iterations;
      outcome.complementarity_delta = kTightComplementarityDelta;
      outcome.status = again.status;
      outcome.message = again.message;
      if (again.status == SolveStatus::kLocalOptimum) {
        std::tie(solution, report) = accept(tight, again);
      }
    }
    if (outcome.status == SolveStatus::kLocalOptimum) {
      if (report.feasible) {
        outcome.solution = std::move(solution);
      } else {
        outcome.status = SolveStatus::kNumericalFailure;
        outcome.message = "validation failed:";
        for (const auto& f : report.families) {
          if (!f.ok()) outcome.message += " " + f.family + " " + std::to_string(f.worst);
        }
      }
      outcome.validation = std::move(report);
    }
  }
  outcome.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
  return outcome;
}

}  // namespace wdn
