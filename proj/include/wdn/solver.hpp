#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wdn/network.hpp"
#include "wdn/nlp_model.hpp"
#include "wdn/solution.hpp"
#include "wdn/validation.hpp"

namespace wdn {

enum class SolveStatus { kLocalOptimum, kInfeasible, kIterationLimit, kNumericalFailure };

std::string_view to_string(SolveStatus status);
SolveStatus parse_solve_status(std::string_view text);

struct SolverOptions {
  std::size_t max_iterations = 3000;
  double feasibility_tolerance = 1e-6;  // per constraint, natural units
  double optimality_tolerance = 1e-4;
  std::uint64_t seed = 0;
};

/// What an adapter hands back before validation.
struct AdapterResult {
  SolveStatus status = SolveStatus::kNumericalFailure;
  std::vector<double> x;
  std::size_t iterations = 0;
  std::string message;
};

/// A local NLP solver. Implementations must be safe to call concurrently on
/// distinct models.
class SolverAdapter {
 public:
  virtual ~SolverAdapter() = default;
  virtual std::string name() const = 0;
  virtual AdapterResult solve(const NlpModel& model, std::span<const double> start,
                              const SolverOptions& options) const = 0;
};

/// Augmented Lagrangian over the box bounds with a projected Newton inner
/// loop, followed by a Gauss-Newton feasibility polish.
class BuiltinSolver final : public SolverAdapter {
 public:
  std::string name() const override { return "builtin"; }
  AdapterResult solve(const NlpModel& model, std::span<const double> start,
                      const SolverOptions& options) const override;
};

AdapterResult builtin_solve(const NlpModel& model, std::span<const double> start,
                            const SolverOptions& options);

/// Ipopt through its C interface, loaded from a shared library at run time.
/// Calls are serialized: the bundled linear solver is not reentrant.
class IpoptAdapter final : public SolverAdapter {
 public:
  /// Throws AdapterError if the library cannot be loaded.
  explicit IpoptAdapter(const std::string& library_path);
  ~IpoptAdapter() override;
  IpoptAdapter(const IpoptAdapter&) = delete;
  IpoptAdapter& operator=(const IpoptAdapter&) = delete;

  std::string name() const override { return "external:ipopt"; }
  AdapterResult solve(const NlpModel& model, std::span<const double> start,
                      const SolverOptions& options) const override;

  struct Api;

 private:
  void* handle_ = nullptr;
  std::unique_ptr<Api> api_;
  mutable std::mutex mutex_;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::kNumericalFailure;
  std::optional<Solution> solution;  // set iff status is kLocalOptimum
  std::optional<ValidationReport> validation;
  std::size_t iterations = 0;
  double wall_time = 0.0;  // seconds
  std::string message;
  /// Complementarity bound actually used (parallel-link models).
  double complementarity_delta = 0.0;
};

// A relaxed split can shave headloss by carrying flow both ways; the cycle
// error this leaves grows like resistance * delta / q^0.148, which at 1e-12
// still exceeds the cycle tolerance on links built from very thin pipe.
inline constexpr double kTightComplementarityDelta = 1e-14;
inline constexpr double kBothDirectionsThreshold = 1e-5;  // m^3/s

/// Runs the adapter from `start` (projected onto the bounds), then validates
/// any claimed local optimum; a failed validation downgrades the status to
/// kNumericalFailure. A parallel-link result that fails validation while some
/// link carries more than kBothDirectionsThreshold in both directions is
/// re-solved once, from that result, with delta tightened to
/// kTightComplementarityDelta.
/// Adapter exceptions surface as AdapterError.
SolveOutcome solve(const Network& network, const NlpModel& model, const SolverAdapter& adapter,
                   std::span<const double> start, const SolverOptions& options = {},
                   const Tolerances& tolerances = {});

}  // namespace wdn
