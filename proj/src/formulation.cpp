#include "wdn/formulation.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "wdn/errors.hpp"
#include "wdn/hydraulics.hpp"

namespace wdn {

namespace {

std::vector<double> pipe_resistances(const Network& network) {
  HeadlossParams params{.omega = network.hw_constant()};
  std::vector<double> r;
  for (const PipeType& p : network.catalog()) {
    r.push_back(resistance(1.0, p.diameter, p.roughness, params));
  }
  return r;
}

// Headloss terms of sum over signed links of sum over pipes of
// sign * r_k * l_jk * phi(q_j). For split flows the reverse variable enters
// with the opposite sign.
void append_headloss(Constraint& c, std::span<const SignEntry> row, const VariableLayout& layout,
                     std::span<const double> resistances) {
  for (const SignEntry& e : row) {
    for (std::size_t k = 0; k < layout.pipes; ++k) {
      double coef = e.value * resistances[k];
      if (layout.split_flow) {
        c.headloss.push_back({layout.length(e.col, k), layout.forward(e.col), coef});
        c.headloss.push_back({layout.length(e.col, k), layout.reverse(e.col), -coef});
      } else {
        c.headloss.push_back({layout.length(e.col, k), layout.flow(e.col), coef});
      }
    }
  }
}

NlpModel build_common(const Network& network, const GraphStructures& graphs, bool split,
                      const FormulationOptions& options) {
  const std::size_t nl = network.link_count();
  const std::size_t np = network.pipe_count();
  VariableLayout layout{nl, np, split};
  std::vector<Variable> vars(layout.size());
  std::vector<double> objective(layout.size(), 0.0);

  for (std::size_t i = 0; i < nl; ++i) {
    const Link& l = network.link(i);
    if (split) {
      vars[layout.forward(i)] = {"qf[" + l.id + "]", 0.0, network.flow_max(), 0.0};
      vars[layout.reverse(i)] = {"qr[" + l.id + "]", 0.0, network.flow_max(), 0.0};
    } else {
      vars[layout.flow(i)] = {"q[" + l.id + "]", -network.flow_max(), network.flow_max(), 0.0};
    }
    for (std::size_t k = 0; k < np; ++k) {
      vars[layout.length(i, k)] = {"l[" + l.id + "," + std::to_string(k) + "]", 0.0, l.length,
                                   l.length / static_cast<double>(np)};
      objective[layout.length(i, k)] = network.catalog()[k].unit_cost;
    }
  }

  std::vector<Constraint> cons;
  const std::size_t source = network.source();

  for (std::size_t v = 0; v < network.node_count(); ++v) {
    if (v == source) continue;  // implied by the other rows
    const Node& n = network.node(v);
    Constraint c{.name = "conservation[" + n.id + "]",
                 .family = ConstraintFamily::kConservation,
                 .lower = n.demand,
                 .upper = n.demand};
    for (const SignEntry& e : graphs.incidence.row(v)) {
      if (split) {
        c.linear.push_back({layout.forward(e.col), double(e.value)});
        c.linear.push_back({layout.reverse(e.col), -double(e.value)});
      } else {
        c.linear.push_back({layout.flow(e.col), double(e.value)});
      }
    }
    cons.push_back(std::move(c));
  }

  for (std::size_t i = 0; i < nl; ++i) {
    const Link& l = network.link(i);
    Constraint c{.name = "segment_sum[" + l.id + "]",
                 .family = ConstraintFamily::kSegmentSum,
                 .lower = l.length,
                 .upper = l.length};
    for (std::size_t k = 0; k < np; ++k) c.linear.push_back({layout.length(i, k), 1.0});
    cons.push_back(std::move(c));
  }

  auto resistances = pipe_resistances(network);
  for (std::size_t r = 0; r < graphs.cycles.matrix.rows(); ++r) {
    Constraint c{.name = "cycle[" + std::to_string(r) + "]",
                 .family = ConstraintFamily::kCycle,
                 .lower = 0.0,
                 .upper = 0.0};
    append_headloss(c, graphs.cycles.matrix.row(r), layout, resistances);
    cons.push_back(std::move(c));
  }

  const double source_elevation = network.node(source).elevation;
  for (std::size_t v = 0; v < network.node_count(); ++v) {
    if (v == source) continue;
    const Node& n = network.node(v);
    Constraint c{.name = "head[" + n.id + "]",
                 .family = ConstraintFamily::kHead,
                 .lower = 0.0,
                 .upper = source_elevation - n.elevation - n.min_pressure};
    append_headloss(c, graphs.paths.matrix.row(v), layout, resistances);
    cons.push_back(std::move(c));
  }

  if (split) {
    for (std::size_t i = 0; i < nl; ++i) {
      Constraint c{.name = "complementarity[" + network.link(i).id + "]",
                   .family = ConstraintFamily::kComplementarity,
                   .lower = -kInfinity,
                   .upper = options.complementarity_delta};
      c.bilinear.push_back({layout.forward(i), layout.reverse(i), 1.0});
      cons.push_back(std::move(c));
    }
  }

  NlpModel model(split ? Formulation::kParallelLink : Formulation::kDiscreteSegment, layout,
                 std::move(vars), std::move(objective), std::move(cons), options.smoothing_epsilon,
                 network.name());
  if (split) model.set_complementarity_delta(options.complementarity_delta);
  return model;
}

}  // namespace

NlpModel build_ds(const Network& network, const GraphStructures& graphs,
                  const FormulationOptions& options) {
  return build_common(network, graphs, false, options);
}

NlpModel build_pl(const Network& network, const GraphStructures& graphs,
                  const FormulationOptions& options) {
  return build_common(network, graphs, true, options);
}

NlpModel build_model(const Network& network, const GraphStructures& graphs, Formulation formulation,
                     const FormulationOptions& options) {
  return formulation == Formulation::kParallelLink ? build_pl(network, graphs, options)
                                                   : build_ds(network, graphs, options);
}

NlpModel build_oriented(const Network& network, const GraphStructures& graphs,
                        std::span<const int> orientation, Formulation base,
                        const FormulationOptions& options) {
  if (orientation.size() != network.link_count()) {
    throw DimensionError("orientation has " + std::to_string(orientation.size()) +
                         " entries, network has " + std::to_string(network.link_count()) +
                         " links");
  }
  bool split = base == Formulation::kParallelLink;
  NlpModel model = build_common(network, graphs, split, options);
  // Variables are only reachable through a const span; rebuild with new bounds.
  std::vector<Variable> vars(model.variables().begin(), model.variables().end());
  const VariableLayout& layout = model.layout();
  const double qm = network.flow_min();
  const double qM = network.flow_max();
  for (std::size_t i = 0; i < network.link_count(); ++i) {
    bool along = orientation[i] > 0;
    if (split) {
      Variable& keep = vars[along ? layout.forward(i) : layout.reverse(i)];
      Variable& drop = vars[along ? layout.reverse(i) : layout.forward(i)];
      keep.lower = qm;
      keep.upper = qM;
      drop.lower = drop.upper = drop.initial = 0.0;
    } else {
      Variable& q = vars[layout.flow(i)];
      q.lower = along ? qm : -qM;
      q.upper = along ? qM : -qm;
      q.initial = std::clamp(q.initial, q.lower, q.upper);
    }
  }
  std::vector<Constraint> cons(model.constraints().begin(), model.constraints().end());
  std::vector<double> objective(model.objective().begin(), model.objective().end());
  NlpModel oriented(model.formulation(), layout, std::move(vars), std::move(objective),
                    std::move(cons), options.smoothing_epsilon, network.name());
  oriented.set_orientation(std::vector<int>(orientation.begin(), orientation.end()));
  oriented.set_complementarity_delta(model.complementarity_delta());
  return oriented;
}

std::vector<double> random_conserving_flows(const Network& network, std::mt19937_64& rng) {
  const std::size_t n = network.node_count();
  const std::size_t m = network.link_count();

  // Random spanning tree: Kruskal on random weights.
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::vector<bool> in_tree(m, false);
  for (std::size_t j : order) {
    auto a = find(network.link(j).tail), b = find(network.link(j).head);
    if (a != b) {
      parent[a] = b;
      in_tree[j] = true;
    }
  }

  std::vector<double> q(m, 0.0);
  const double spread = 0.2 * network.total_demand();
  std::uniform_real_distribution<double> noise(-spread, spread);
  for (std::size_t j = 0; j < m; ++j) {
    if (!in_tree[j]) q[j] = noise(rng);
  }

  // Root the tree at the source; settle tree flows from the leaves up.
  std::vector<std::size_t> up_link(n, kNone), bfs{network.source()};
  std::vector<bool> seen(n, false);
  seen[network.source()] = true;
  for (std::size_t k = 0; k < bfs.size(); ++k) {
    std::size_t u = bfs[k];
    for (std::size_t j : network.incident_links(u)) {
      if (!in_tree[j]) continue;
      std::size_t v = network.link(j).other(u);
      if (!seen[v]) {
        seen[v] = true;
        up_link[v] = j;
        bfs.push_back(v);
      }
    }
  }
  for (std::size_t k = bfs.size(); k-- > 1;) {
    std::size_t v = bfs[k];
    std::size_t p = up_link[v];
    double rest = network.node(v).demand;
    for (std::size_t j : network.incident_links(v)) {
      if (j == p) continue;
      rest -= (network.link(j).head == v ? 1.0 : -1.0) * q[j];
    }
    q[p] = (network.link(p).head == v ? 1.0 : -1.0) * rest;
  }
  return q;
}

void project_to_bounds(const NlpModel& model, std::span<double> x) {
  auto vars = model.variables();
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = std::clamp(x[j], vars[j].lower, vars[j].upper);
}

std::vector<double> start_point(const NlpModel& model, const Network& network,
                                std::span<const double> flows) {
  std::vector<double> x = model.initial_point();
  const VariableLayout& layout = model.layout();
  for (std::size_t i = 0; i < network.link_count(); ++i) {
    if (layout.split_flow) {
      x[layout.forward(i)] = std::max(flows[i], 0.0);
      x[layout.reverse(i)] = std::max(-flows[i], 0.0);
    } else {
      x[layout.flow(i)] = flows[i];
    }
    for (std::size_t k = 0; k < layout.pipes; ++k) {
      x[layout.length(i, k)] = network.link(i).length / static_cast<double>(layout.pipes);
    }
  }
  project_to_bounds(model, x);
  return x;
}

Solution solution_from_point(const Network& network, const NlpModel& model,
                             std::span<const double> x) {
  const VariableLayout& layout = model.layout();
  Solution s;
  s.flows.resize(layout.links);
  s.segment_lengths = SegmentLengths(layout.links, layout.pipes);
  if (layout.split_flow) {
    s.forward_flows.emplace(layout.links);
    s.reverse_flows.emplace(layout.links);
  }
  for (std::size_t i = 0; i < layout.links; ++i) {
    if (layout.split_flow) {
      (*s.forward_flows)[i] = x[layout.forward(i)];
      (*s.reverse_flows)[i] = x[layout.reverse(i)];
      s.flows[i] = x[layout.forward(i)] - x[layout.reverse(i)];
    } else {
      s.flows[i] = x[layout.flow(i)];
    }
    for (std::size_t k = 0; k < layout.pipes; ++k) s.segment_lengths(i, k) = x[layout.length(i, k)];
  }
  s.cost = network_cost(network, s.segment_lengths);
  s.formulation = std::string(to_string(model.formulation()));
  return s;
}

std::vector<double> point_from_solution(const NlpModel& model, const Solution& solution) {
  const VariableLayout& layout = model.layout();
  if (solution.flows.size() != layout.links || solution.segment_lengths.links() != layout.links ||
      solution.segment_lengths.pipes() != layout.pipes) {
    throw DimensionError("solution shape does not match the model");
  }
  std::vector<double> x(layout.size(), 0.0);
  for (std::size_t i = 0; i < layout.links; ++i) {
    if (layout.split_flow) {
      if (solution.forward_flows && solution.reverse_flows) {
        x[layout.forward(i)] = (*solution.forward_flows)[i];
        x[layout.reverse(i)] = (*solution.reverse_flows)[i];
      } else {
        x[layout.forward(i)] = std::max(solution.flows[i], 0.0);
        x[layout.reverse(i)] = std::max(-solution.flows[i], 0.0);
      }
    } else {
      x[layout.flow(i)] = solution.flows[i];
    }
    for (std::size_t k = 0; k < layout.pipes; ++k) {
      x[layout.length(i, k)] = solution.segment_lengths(i, k);
    }
  }
  return x;
}

}  // namespace wdn
