#include "wdn/validation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wdn/errors.hpp"
#include "wdn/graph.hpp"
#include "wdn/hydraulics.hpp"

namespace wdn {

const FamilyResidual& ValidationReport::family(std::string_view name) const {
  for (const auto& f : families) {
    if (f.family == name) return f;
  }
  throw std::out_of_range("no residual family '" + std::string(name) + "'");
}

double link_headloss(const Network& network, const Solution& solution, std::size_t link) {
  HeadlossParams params{.omega = network.hw_constant()};
  double h = 0.0;
  for (std::size_t k = 0; k < network.pipe_count(); ++k) {
    const PipeType& p = network.catalog()[k];
    h += signed_headloss(solution.flows[link], solution.segment_lengths(link, k), p.diameter,
                         p.roughness, params);
  }
  return h;
}

namespace {

void check_shape(const Network& network, const Solution& solution) {
  if (solution.flows.size() != network.link_count() ||
      solution.segment_lengths.links() != network.link_count() ||
      solution.segment_lengths.pipes() != network.pipe_count()) {
    throw DimensionError("solution shape does not match the network");
  }
  auto split_ok = [&](const std::optional<std::vector<double>>& v) {
    return !v || v->size() == network.link_count();
  };
  if (!split_ok(solution.forward_flows) || !split_ok(solution.reverse_flows)) {
    throw DimensionError("split flows do not match the network");
  }
}

double path_loss(std::span<const SignedLink> path, std::span<const double> losses) {
  double total = 0.0;
  for (const SignedLink& s : path) total += s.sign * losses[s.link];
  return total;
}

}  // namespace

HeadComputation compute_heads(const Network& network, const Solution& solution) {
  check_shape(network, solution);
  std::vector<double> losses(network.link_count());
  for (std::size_t j = 0; j < network.link_count(); ++j) {
    losses[j] = link_headloss(network, solution, j);
  }
  const double source_head = network.node(network.source()).elevation;
  SpanningTree primary = build_spanning_tree(network);

  HeadComputation out;
  out.heads.resize(network.node_count());
  std::vector<std::vector<SignedLink>> primary_paths(network.node_count());
  for (std::size_t v = 0; v < network.node_count(); ++v) {
    primary_paths[v] = primary.path_to(network, v);
    out.heads[v] = source_head - path_loss(primary_paths[v], losses);
  }
  for (TreeStrategy alt : {TreeStrategy::kBreadthFirstReversed, TreeStrategy::kDepthFirst,
                           TreeStrategy::kShortestLength}) {
    SpanningTree tree = build_spanning_tree(network, alt);
    for (std::size_t v = 0; v < network.node_count(); ++v) {
      auto path = tree.path_to(network, v);
      if (path == primary_paths[v]) continue;
      ++out.alternative_paths;
      double head = source_head - path_loss(path, losses);
      out.max_path_discrepancy = std::max(out.max_path_discrepancy, std::abs(head - out.heads[v]));
    }
  }
  return out;
}

ValidationReport validate(const Network& network, const Solution& solution,
                          const Tolerances& tol) {
  check_shape(network, solution);
  ValidationReport report;
  auto family = [&](std::string name, double tolerance) -> FamilyResidual& {
    report.families.push_back({std::move(name), 0.0, tolerance, ""});
    return report.families.back();
  };
  auto record = [&](FamilyResidual& f, double amount, const std::string& where) {
    if (amount > f.worst) {
      f.worst = amount;
      f.location = where;
    }
    if (amount > f.tolerance) report.violations.push_back({f.family, where, amount});
  };

  const std::size_t source = network.source();

  {
    FamilyResidual& f = family("conservation", tol.conservation);
    std::vector<double> net(network.node_count(), 0.0);
    for (std::size_t j = 0; j < network.link_count(); ++j) {
      const Link& l = network.link(j);
      net[l.head] += solution.flows[j];
      net[l.tail] -= solution.flows[j];
    }
    double others = 0.0;
    double source_residual = 0.0;
    for (std::size_t v = 0; v < network.node_count(); ++v) {
      double demand = v == source ? -network.total_demand() : network.node(v).demand;
      double r = net[v] - demand;
      if (v == source) {
        source_residual = r;
      } else {
        others += r;
      }
      record(f, std::abs(r), "node " + network.node(v).id);
    }
    report.source_balance_gap = std::abs(source_residual + others);
  }

  {
    FamilyResidual& f = family("segment_sum", tol.segment_sum);
    for (std::size_t j = 0; j < network.link_count(); ++j) {
      const Link& l = network.link(j);
      record(f, std::abs(solution.segment_lengths.link_total(j) - l.length), "link " + l.id);
      for (std::size_t k = 0; k < network.pipe_count(); ++k) {
        double len = solution.segment_lengths(j, k);
        if (len < 0.0) {
          record(f, -len, "link " + l.id + " pipe " + std::to_string(k) + " negative length");
        }
      }
    }
  }

  std::vector<double> losses(network.link_count());
  for (std::size_t j = 0; j < network.link_count(); ++j) {
    losses[j] = link_headloss(network, solution, j);
  }

  SpanningTree tree = build_spanning_tree(network);
  CycleBasis basis = build_cycle_basis(network, tree);
  {
    FamilyResidual& f = family("cycle", tol.cycle);
    for (std::size_t c = 0; c < basis.cycles.size(); ++c) {
      record(f, std::abs(path_loss(basis.cycles[c], losses)), "cycle " + std::to_string(c));
    }
  }

  HeadComputation heads = compute_heads(network, solution);
  report.heads = heads.heads;
  {
    FamilyResidual& f = family("head", tol.head);
    const double source_head = network.node(source).elevation;
    for (std::size_t v = 0; v < network.node_count(); ++v) {
      if (v == source) continue;
      const Node& n = network.node(v);
      double loss = source_head - heads.heads[v];
      double margin = source_head - n.elevation - n.min_pressure;
      double amount = std::max({0.0, -loss, loss - margin});
      record(f, amount, "node " + n.id);
    }
  }

  {
    FamilyResidual& f = family("flow_range", tol.flow_range);
    for (std::size_t j = 0; j < network.link_count(); ++j) {
      double a = std::abs(solution.flows[j]);
      double amount = std::max(0.0, a - network.flow_max());
      if (network.flow_min() > 0.0 && a > tol.flow_range && a < network.flow_min()) {
        amount = std::max(amount, network.flow_min() - a);
      }
      record(f, amount, "link " + network.link(j).id);
    }
  }

  {
    FamilyResidual& f = family("complementarity", tol.complementarity);
    if (solution.forward_flows && solution.reverse_flows) {
      for (std::size_t j = 0; j < network.link_count(); ++j) {
        double qf = (*solution.forward_flows)[j], qr = (*solution.reverse_flows)[j];
        double amount = std::max(0.0, qf * qr);
        if (std::abs((qf - qr) - solution.flows[j]) > tol.flow_range) {
          amount = std::max(amount, std::abs((qf - qr) - solution.flows[j]));
        }
        record(f, amount, "link " + network.link(j).id);
      }
    }
  }

  {
    FamilyResidual& f = family("cost", tol.cost_relative);
    double expected = network_cost(network, solution.segment_lengths);
    record(f, std::abs(solution.cost - expected) / std::max(1.0, std::abs(expected)), "objective");
  }

  {
    double allowed = static_cast<double>(std::max<std::size_t>(1, basis.cycles.size())) * tol.cycle;
    FamilyResidual& f = family("path_independence", allowed);
    record(f, heads.max_path_discrepancy, "alternative source paths");
  }

  report.feasible = report.violations.empty();
  return report;
}

}  // namespace wdn
