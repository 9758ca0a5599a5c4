#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wdn/network.hpp"
#include "wdn/nlp_model.hpp"

namespace wdn::test {

/// Grid-search optimum of a single-cycle network S-A-B with two pipe types:
/// the flow on A-B moves in steps of `flow_step`, the thin-pipe lengths of
/// S-A and A-B in steps of `length_step`, and the S-B split is solved from
/// the zero-loss cycle condition. Only the hydraulic closed form is used.
struct GridOptimum {
  double cost = std::numeric_limits<double>::infinity();
  double flow_ab = 0.0;  // A -> B
};

inline GridOptimum toy_grid_search(const Network& n, double flow_step = 1e-3, double length_step = 1.0) {
  if (n.node_count() != 3 || n.link_count() != 3 || n.pipe_count() != 2) {
    throw std::invalid_argument("toy_grid_search needs 3 nodes, 3 links and 2 pipe types");
  }
  const std::size_t s = n.source();
  std::size_t a = s == 0 ? 1 : 0;
  std::size_t b = 3 - s - a;
  auto link_between = [&](std::size_t u, std::size_t v) {
    for (std::size_t j = 0; j < 3; ++j) {
      const Link& l = n.link(j);
      if ((l.tail == u && l.head == v) || (l.tail == v && l.head == u)) return j;
    }
    throw std::invalid_argument("toy_grid_search needs a triangle");
  };
  const Link& sa = n.link(link_between(s, a));
  const Link& sb = n.link(link_between(s, b));
  const Link& ab = n.link(link_between(a, b));

  // Loss per metre at unit flow for each pipe type.
  double c[2], price[2];
  for (int k = 0; k < 2; ++k) {
    const PipeType& p = n.catalog()[static_cast<std::size_t>(k)];
    c[k] = n.hw_constant() / (std::pow(p.roughness, 1.852) * std::pow(p.diameter, 4.87));
    price[k] = p.unit_cost;
  }
  auto power = [](double q) { return std::copysign(std::pow(std::abs(q), 1.852), q); };
  // Resistance of a link with `thin` metres of pipe 0 and the rest pipe 1.
  auto resistance = [&](double thin, double length) { return c[0] * thin + c[1] * (length - thin); };
  auto cost_of = [&](double thin, double length) { return price[0] * thin + price[1] * (length - thin); };

  const double es = n.node(s).elevation;
  const double da = n.node(a).demand, db = n.node(b).demand;
  const double floor_a = n.node(a).elevation + n.node(a).min_pressure;
  const double floor_b = n.node(b).elevation + n.node(b).min_pressure;
  const double qmax = n.flow_max();

  GridOptimum best;
  const auto steps_sa = static_cast<long>(std::floor(sa.length / length_step));
  const auto steps_ab = static_cast<long>(std::floor(ab.length / length_step));
  const long tmin = static_cast<long>(std::ceil(-qmax / flow_step)), tmax = -tmin;
  for (long ti = tmin; ti <= tmax; ++ti) {
    const double t = static_cast<double>(ti) * flow_step;
    const double q_sa = da + t, q_sb = db - t;
    if (q_sb == 0.0 || std::abs(q_sa) > qmax || std::abs(q_sb) > qmax) continue;
    const double p_sa = power(q_sa), p_sb = power(q_sb), p_ab = power(t);
    for (long i = 0; i <= steps_sa; ++i) {
      const double l1 = static_cast<double>(i) * length_step;
      const double head_a = es - p_sa * resistance(l1, sa.length);
      if (head_a < floor_a || head_a > es) continue;
      const double cost1 = cost_of(l1, sa.length);
      for (long k = 0; k <= steps_ab; ++k) {
        const double l3 = static_cast<double>(k) * length_step;
        const double head_b = head_a - p_ab * resistance(l3, ab.length);
        if (head_b < floor_b || head_b > es) continue;
        // es - head_b = p_sb * r_sb, r_sb linear in the thin length.
        const double r_sb = (es - head_b) / p_sb;
        const double l2 = (r_sb - c[1] * sb.length) / (c[0] - c[1]);
        if (l2 < 0.0 || l2 > sb.length) continue;
        const double cost = cost1 + cost_of(l2, sb.length) + cost_of(l3, ab.length);
        if (cost < best.cost) best = {cost, t};
      }
    }
  }
  return best;
}

/// Orientation feasibility by Kahn's algorithm plus the in-degree rules.
inline bool oracle_feasible(const Network& n, const std::vector<int>& d) {
  std::vector<std::size_t> indeg(n.node_count(), 0);
  std::vector<std::vector<std::size_t>> out(n.node_count());
  for (std::size_t j = 0; j < n.link_count(); ++j) {
    const Link& l = n.link(j);
    std::size_t from = d[j] > 0 ? l.tail : l.head, to = d[j] > 0 ? l.head : l.tail;
    out[from].push_back(to);
    ++indeg[to];
  }
  if (indeg[n.source()] != 0) return false;
  for (std::size_t v = 0; v < n.node_count(); ++v) {
    if (v != n.source() && indeg[v] == 0) return false;
  }
  std::vector<std::size_t> remaining = indeg, stack{n.source()};
  std::size_t visited = 0;
  while (!stack.empty()) {
    std::size_t u = stack.back();
    stack.pop_back();
    ++visited;
    for (std::size_t v : out[u]) {
      if (--remaining[v] == 0) stack.push_back(v);
    }
  }
  return visited == n.node_count();
}

/// Every sign pattern over the links that passes oracle_feasible.
inline std::set<std::vector<int>> brute_force(const Network& n) {
  std::set<std::vector<int>> out;
  const std::size_t links = n.link_count();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << links); ++mask) {
    std::vector<int> d(links);
    for (std::size_t j = 0; j < links; ++j) d[j] = (mask >> j) & 1 ? -1 : 1;
    if (oracle_feasible(n, d)) out.insert(d);
  }
  return out;
}

struct SmallGraph {
  const char* name;
  std::size_t nodes;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

/// Small multigraphs over n0..n{k-1}, n0 the source, for exhaustive checks.
inline const std::vector<SmallGraph>& small_graphs() {
  static const std::vector<SmallGraph> graphs{
      {"ring through source", 4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}},
      {"theta", 4, {{0, 1}, {1, 3}, {0, 2}, {2, 3}, {0, 3}}},
      {"parallel pair", 2, {{0, 1}, {0, 1}}},
      {"triple parallel plus tail", 3, {{0, 1}, {0, 1}, {0, 1}, {1, 2}}},
      {"k4", 4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}},
      {"grid 3x3", 9, {{0, 1}, {1, 2}, {3, 4}, {4, 5}, {6, 7}, {7, 8},
                       {0, 3}, {3, 6}, {1, 4}, {4, 7}, {2, 5}, {5, 8}}},
      {"source off the cycle", 5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 1}}},
      {"two blocks at a cut vertex", 5, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {4, 2}}},
      {"cycle behind a bridge chain", 6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 2}, {3, 5}}},
      {"bowtie with pendant", 6, {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {3, 4}, {4, 0}, {4, 5}}},
      {"wheel", 5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 2}, {2, 3}, {3, 4}, {4, 1}}},
      {"ladder", 8, {{0, 1}, {2, 3}, {4, 5}, {6, 7}, {0, 2}, {2, 4}, {4, 6}, {1, 3}, {3, 5}, {5, 7}}},
      {"parallel inside a cycle", 4, {{0, 1}, {1, 2}, {1, 2}, {2, 3}, {3, 0}}},
  };
  return graphs;
}

/// Derivative of f at x0 by Ridders' extrapolation of central differences,
/// starting from step h and shrinking it; returns the estimate with the
/// smallest error bound.
template <class F>
double ridders_derivative(F&& f, double x0, double h) {
  constexpr int kSize = 10;
  constexpr double kShrink = 1.4, kShrink2 = kShrink * kShrink;
  double a[kSize][kSize];
  a[0][0] = (f(x0 + h) - f(x0 - h)) / (2 * h);
  double best = a[0][0], err = std::numeric_limits<double>::infinity();
  for (int i = 1; i < kSize; ++i) {
    h /= kShrink;
    a[0][i] = (f(x0 + h) - f(x0 - h)) / (2 * h);
    double fac = kShrink2;
    for (int j = 1; j <= i; ++j) {
      a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1);
      fac *= kShrink2;
      const double e = std::max(std::abs(a[j][i] - a[j - 1][i]), std::abs(a[j][i] - a[j - 1][i - 1]));
      if (e <= err) {
        err = e;
        best = a[j][i];
      }
    }
    if (std::abs(a[i][i] - a[i - 1][i - 1]) >= 2 * err) break;
  }
  return best;
}

/// Largest relative gap between the analytic Jacobian of `m` at `x` and
/// numerical derivatives of the residuals. The part of each gap that double
/// precision cannot resolve (a few ulps of the residual over the step) is
/// discounted; entries below `floor` in magnitude are compared against
/// `floor` instead. Columns of fixed variables are skipped: there is no
/// feasible direction to differentiate along.
inline double jacobian_gap(const NlpModel& m, std::vector<double> x, double floor = 1e-10) {
  std::vector<double> jac(m.jacobian_structure().size());
  m.jacobian(x, jac);
  double worst = 0.0;
  for (std::size_t k = 0; k < jac.size(); ++k) {
    const auto [row, var] = m.jacobian_structure()[k];
    if (m.variables()[var].lower == m.variables()[var].upper) continue;
    const double x0 = x[var];
    auto residual = [&](double v) {
      x[var] = v;
      const double r = m.residual(row, x);
      x[var] = x0;
      return r;
    };
    const double h = 0.5 * std::max(std::abs(x0), 1e-8);
    const double fd = ridders_derivative(residual, x0, h);
    const double noise = 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(residual(x0))) / h;
    const double gap = std::max(0.0, std::abs(jac[k] - fd) - noise);
    worst = std::max(worst, gap / std::max(std::abs(jac[k]), floor));
  }
  return worst;
}

}  // namespace wdn::test
