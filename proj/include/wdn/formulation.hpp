#pragma once

#include <random>
#include <span>
#include <vector>

#include "wdn/graph.hpp"
#include "wdn/network.hpp"
#include "wdn/nlp_model.hpp"
#include "wdn/solution.hpp"

namespace wdn {

struct FormulationOptions {
  double smoothing_epsilon = 1e-6;       // m^3/s
  double complementarity_delta = 1e-8;   // (m^3/s)^2, parallel-link only
};

/// Discrete Segment model: signed flow per link in [-q_M, q_M], segment
/// length per (link, pipe). Constraints, in order: conservation (demand
/// nodes), segment sums (links), cycle headloss (basis cycles), head range
/// (demand nodes).
NlpModel build_ds(const Network& network, const GraphStructures& graphs,
                  const FormulationOptions& options = {});

/// Parallel Link model: forward and reverse flow per link in [0, q_M], the
/// same constraint families as DS followed by one relaxed complementarity
/// row q_fwd * q_rev <= delta per link.
NlpModel build_pl(const Network& network, const GraphStructures& graphs,
                  const FormulationOptions& options = {});

/// `base` with flow signs fixed by `orientation` (+1 along the link's positive
/// direction, -1 against it).
NlpModel build_oriented(const Network& network, const GraphStructures& graphs,
                        std::span<const int> orientation, Formulation base,
                        const FormulationOptions& options = {});

NlpModel build_model(const Network& network, const GraphStructures& graphs, Formulation formulation,
                     const FormulationOptions& options = {});

/// Random flow pattern that satisfies conservation exactly: flows on links
/// outside a random spanning tree are drawn from +-0.2 * total demand, tree
/// flows follow from conservation.
std::vector<double> random_conserving_flows(const Network& network, std::mt19937_64& rng);

/// Start point for `model` from a signed flow pattern: flows mapped into the
/// model's flow variables (split for PL), segment lengths uniform, everything
/// projected onto the variable bounds.
std::vector<double> start_point(const NlpModel& model, const Network& network,
                                std::span<const double> flows);

/// Clamps x onto the model's variable bounds.
void project_to_bounds(const NlpModel& model, std::span<double> x);

/// Reads flows and segment lengths out of a model point.
Solution solution_from_point(const Network& network, const NlpModel& model,
                             std::span<const double> x);

/// Inverse of solution_from_point for a given model (PL splits net flow into
/// its positive and negative parts).
std::vector<double> point_from_solution(const NlpModel& model, const Solution& solution);

}  // namespace wdn
