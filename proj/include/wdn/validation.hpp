#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "wdn/network.hpp"
#include "wdn/solution.hpp"

namespace wdn {

struct Tolerances {
  double conservation = 1e-7;     // m^3/s
  double cycle = 1e-4;            // m
  double head = 1e-4;             // m
  double segment_sum = 1e-6;      // m
  double complementarity = 1e-6;  // (m^3/s)^2
  double flow_range = 1e-7;       // m^3/s
  double cost_relative = 1e-6;
};

struct FamilyResidual {
  std::string family;
  double worst = 0.0;
  double tolerance = 0.0;
  std::string location;  // where the worst residual occurs

  bool ok() const { return worst <= tolerance; }
};

struct Violation {
  std::string family;
  std::string location;
  double amount = 0.0;
};

struct ValidationReport {
  /// conservation, segment_sum, cycle, head, flow_range, complementarity,
  /// cost, path_independence.
  std::vector<FamilyResidual> families;
  std::vector<double> heads;  // per node, m
  std::vector<Violation> violations;
  bool feasible = false;
  /// |source residual + sum of the other conservation residuals|.
  double source_balance_gap = 0.0;

  const FamilyResidual& family(std::string_view name) const;
};

struct HeadComputation {
  std::vector<double> heads;  // per node, m
  /// Largest disagreement between the tree-path head and heads recomputed
  /// along up to three alternative source paths per node.
  double max_path_discrepancy = 0.0;
  std::size_t alternative_paths = 0;
};

/// Head at the source is its elevation; elsewhere the source elevation minus
/// the signed Hazen-Williams losses along the breadth-first tree path.
HeadComputation compute_heads(const Network& network, const Solution& solution);

/// Recomputes every constraint of the design problem from scratch with the
/// unsmoothed headloss. Throws DimensionError on shape mismatch.
ValidationReport validate(const Network& network, const Solution& solution,
                          const Tolerances& tolerances = {});

/// Sum of signed headlosses of link `link` over its pipe segments.
double link_headloss(const Network& network, const Solution& solution, std::size_t link);

}  // namespace wdn
