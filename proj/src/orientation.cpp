#include "wdn/orientation.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <optional>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>

#include "wdn/graph.hpp"

namespace wdn {

std::string Orientation::signature() const {
  std::string s;
  s.reserve(direction.size());
  for (int d : direction) s.push_back(d > 0 ? '+' : '-');
  return s;
}

Orientation Orientation::from_signature(std::string_view signature, Provenance provenance) {
  Orientation o;
  o.provenance = provenance;
  for (char c : signature) {
    if (c != '+' && c != '-') throw std::invalid_argument("orientation signature uses only + and -");
    o.direction.push_back(c == '+' ? 1 : -1);
  }
  return o;
}

Feasibility is_feasible(std::span<const int> direction,
                        std::span<const std::pair<std::size_t, std::size_t>> edges,
                        std::size_t node_count, std::size_t source) {
  std::vector<std::vector<std::size_t>> out(node_count);
  std::vector<std::size_t> indegree(node_count, 0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto [u, v] = edges[e];
    if (direction[e] < 0) std::swap(u, v);
    out[u].push_back(v);
    ++indegree[v];
  }

  // Cycle search: iterative DFS with colors.
  std::vector<int> color(node_count, 0);
  std::vector<std::size_t> parent(node_count, kNone);
  for (std::size_t start = 0; start < node_count; ++start) {
    if (color[start]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{start, 0}};
    color[start] = 1;
    while (!stack.empty()) {
      auto& [u, pos] = stack.back();
      if (pos == out[u].size()) {
        color[u] = 2;
        stack.pop_back();
        continue;
      }
      std::size_t v = out[u][pos++];
      if (color[v] == 1) {
        Feasibility f{false, FeasibilityRule::kCycle, "directed cycle", {}};
        for (std::size_t w = u; w != v; w = parent[w]) f.witness.push_back(w);
        f.witness.push_back(v);
        std::reverse(f.witness.begin(), f.witness.end());
        return f;
      }
      if (color[v] == 0) {
        color[v] = 1;
        parent[v] = u;
        stack.emplace_back(v, 0);
      }
    }
  }

  for (std::size_t v = 0; v < node_count; ++v) {
    if (v != source && indegree[v] == 0) {
      return {false, FeasibilityRule::kStarvedNode, "node without incoming link", {v}};
    }
  }
  if (indegree[source] != 0) {
    return {false, FeasibilityRule::kSourceInflow, "source has incoming link", {source}};
  }
  return {};
}

Feasibility is_feasible(const Orientation& orientation, const Network& network) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const Link& l : network.links()) edges.emplace_back(l.tail, l.head);
  Feasibility f = is_feasible(orientation.direction, edges, network.node_count(), network.source());
  if (!f.feasible) {
    std::string where;
    for (std::size_t v : f.witness) where += (where.empty() ? "" : " ") + network.node(v).id;
    f.reason += " (" + where + ")";
  }
  return f;
}

std::size_t ReducedGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& c : components_) total += c.edges.size();
  return total;
}

ReducedGraph reduce_graph(const Network& network) {
  ReducedGraph rg;
  rg.node_count_ = network.node_count();
  rg.source_ = network.source();
  for (const Link& l : network.links()) rg.link_ends_.emplace_back(l.tail, l.head);

  using Expr = ReducedGraph::Expr;
  using ExprKind = ReducedGraph::ExprKind;
  using StepKind = ReducedGraph::StepKind;

  std::set<std::size_t> active;  // expression ids of edges in the working graph
  for (std::size_t j = 0; j < network.link_count(); ++j) {
    rg.exprs_.push_back(Expr{.kind = ExprKind::kLink,
                             .a = network.link(j).tail,
                             .b = network.link(j).head,
                             .link = j});
    active.insert(j);
  }
  std::vector<bool> is_source(rg.node_count_, false);
  is_source[rg.source_] = true;

  auto step = [&](StepKind kind, std::size_t expr) {
    rg.steps_.push_back({kind, expr, active.size()});
  };
  auto incident = [&](std::size_t node) {
    std::vector<std::size_t> out;
    for (std::size_t e : active) {
      const Expr& x = rg.exprs_[e];
      if (x.a == node) out.push_back(e);
      if (x.b == node) out.push_back(e);  // loops appear twice
    }
    return out;
  };

  bool changed = true;
  while (changed) {
    changed = false;

    // (a) bridges, directed away from their component's source.
    {
      std::vector<std::size_t> ids(active.begin(), active.end());
      std::vector<std::pair<std::size_t, std::size_t>> ends;
      for (std::size_t e : ids) ends.emplace_back(rg.exprs_[e].a, rg.exprs_[e].b);
      auto bridge_pos = find_bridges(rg.node_count_, ends);
      if (!bridge_pos.empty()) {
        // BFS distances from every component source.
        std::vector<std::vector<std::size_t>> adj(rg.node_count_);
        for (const auto& [u, v] : ends) {
          adj[u].push_back(v);
          adj[v].push_back(u);
        }
        std::vector<std::size_t> dist(rg.node_count_, kNone);
        std::queue<std::size_t> frontier;
        for (std::size_t v = 0; v < rg.node_count_; ++v) {
          if (is_source[v]) {
            dist[v] = 0;
            frontier.push(v);
          }
        }
        while (!frontier.empty()) {
          std::size_t u = frontier.front();
          frontier.pop();
          for (std::size_t v : adj[u]) {
            if (dist[v] == kNone) {
              dist[v] = dist[u] + 1;
              frontier.push(v);
            }
          }
        }
        for (std::size_t p : bridge_pos) {
          std::size_t e = ids[p];
          const Expr& x = rg.exprs_[e];
          bool a_first = dist[x.a] < dist[x.b];
          std::size_t tail = a_first ? x.a : x.b, head = a_first ? x.b : x.a;
          active.erase(e);
          is_source[head] = true;
          rg.bridges_.push_back({e, tail, head});
          step(StepKind::kBridge, e);
        }
        changed = true;
      }
    }

    // (b) collapse degree-2 non-source nodes.
    for (bool collapsed = true; collapsed;) {
      collapsed = false;
      for (std::size_t w = 0; w < rg.node_count_; ++w) {
        if (is_source[w]) continue;
        auto inc = incident(w);
        if (inc.size() != 2 || inc[0] == inc[1]) continue;
        const Expr& e1 = rg.exprs_[inc[0]];
        const Expr& e2 = rg.exprs_[inc[1]];
        Expr s{.kind = ExprKind::kSeries,
               .a = e1.a == w ? e1.b : e1.a,
               .b = e2.a == w ? e2.b : e2.a,
               .first = inc[0],
               .second = inc[1],
               .middle = w,
               .may_be_undirected = true};
        active.erase(inc[0]);
        active.erase(inc[1]);
        rg.exprs_.push_back(s);
        active.insert(rg.exprs_.size() - 1);
        step(StepKind::kSeries, rg.exprs_.size() - 1);
        collapsed = changed = true;
      }
    }

    // (c) self-loops.
    for (auto it = active.begin(); it != active.end();) {
      std::size_t e = *it;
      if (rg.exprs_[e].a == rg.exprs_[e].b) {
        it = active.erase(it);
        rg.loops_.push_back(e);
        step(StepKind::kSelfLoop, e);
        changed = true;
      } else {
        ++it;
      }
    }

    // (d) merge parallel edges.
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> groups;
    for (std::size_t e : active) {
      const Expr& x = rg.exprs_[e];
      groups[std::minmax(x.a, x.b)].push_back(e);
    }
    for (auto& [key, members] : groups) {
      std::size_t acc = members[0];
      for (std::size_t k = 1; k < members.size(); ++k) {
        const Expr& x = rg.exprs_[acc];
        Expr p{.kind = ExprKind::kParallel,
               .a = x.a,
               .b = x.b,
               .first = acc,
               .second = members[k],
               .may_be_undirected = x.may_be_undirected && rg.exprs_[members[k]].may_be_undirected};
        active.erase(acc);
        active.erase(members[k]);
        rg.exprs_.push_back(p);
        acc = rg.exprs_.size() - 1;
        active.insert(acc);
        step(StepKind::kParallel, acc);
        changed = true;
      }
    }
  }

  // Components of what is left, one per source.
  std::vector<std::vector<std::size_t>> adj(rg.node_count_);
  for (std::size_t e : active) {
    adj[rg.exprs_[e].a].push_back(e);
    adj[rg.exprs_[e].b].push_back(e);
  }
  std::vector<bool> seen(rg.node_count_, false);
  for (std::size_t s = 0; s < rg.node_count_; ++s) {
    if (!is_source[s] || adj[s].empty()) continue;
    ReducedGraph::Component comp;
    comp.source = s;
    std::set<std::size_t> edges;
    std::vector<std::size_t> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      comp.nodes.push_back(u);
      for (std::size_t e : adj[u]) {
        edges.insert(e);
        std::size_t v = rg.exprs_[e].a == u ? rg.exprs_[e].b : rg.exprs_[e].a;
        if (!seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
    std::sort(comp.nodes.begin(), comp.nodes.end());
    comp.edges.assign(edges.begin(), edges.end());
    rg.components_.push_back(std::move(comp));
  }
  return rg;
}

namespace {

// Expansion state of an expression: directed out of `from`, or undirected
// (a sink inside, no inflow to either endpoint).
struct State {
  bool directed = true;
  std::size_t from = 0;
};

struct Pending {
  std::size_t expr;
  State state;
};

using Choice = std::pair<Pending, std::optional<Pending>>;

// Admissible child assignments of one expression in the given state.
std::vector<Choice> local_options(const ReducedGraph& rg, const Pending& p) {
  const auto& x = rg.exprs()[p.expr];
  const auto& exprs = rg.exprs();
  std::vector<Choice> opts;
  switch (x.kind) {
    case ReducedGraph::ExprKind::kLink:
      break;
    case ReducedGraph::ExprKind::kSeries: {
      const auto& e1 = exprs[x.first];
      const auto& e2 = exprs[x.second];
      if (p.state.directed) {
        bool forward = p.state.from == x.a;
        std::size_t in_node = forward ? x.a : x.b;  // where flow enters the path
        // e1 joins a and middle, e2 joins middle and b.
        if (forward) {
          opts.push_back({{x.first, {true, in_node}}, Pending{x.second, {true, x.middle}}});
        } else {
          opts.push_back({{x.second, {true, in_node}}, Pending{x.first, {true, x.middle}}});
        }
      } else {
        opts.push_back({{x.first, {true, x.a}}, Pending{x.second, {true, x.b}}});
        if (e1.may_be_undirected) {
          opts.push_back({{x.first, {false, 0}}, Pending{x.second, {true, x.b}}});
        }
        if (e2.may_be_undirected) {
          opts.push_back({{x.first, {true, x.a}}, Pending{x.second, {false, 0}}});
        }
      }
      break;
    }
    case ReducedGraph::ExprKind::kParallel: {
      const auto& e1 = exprs[x.first];
      const auto& e2 = exprs[x.second];
      if (p.state.directed) {
        opts.push_back({{x.first, p.state}, Pending{x.second, p.state}});
        if (e2.may_be_undirected) opts.push_back({{x.first, p.state}, Pending{x.second, {false, 0}}});
        if (e1.may_be_undirected) opts.push_back({{x.first, {false, 0}}, Pending{x.second, p.state}});
      } else {
        opts.push_back({{x.first, {false, 0}}, Pending{x.second, {false, 0}}});
      }
      break;
    }
  }
  return opts;
}

void assign_link(const ReducedGraph& rg, const Pending& p, std::vector<int>& direction) {
  const auto& x = rg.exprs()[p.expr];
  assert(p.state.directed);
  direction[x.link] = p.state.from == rg.link_ends()[x.link].first ? +1 : -1;
}

// Depth-first expansion of every admissible choice.
void expand_all(const ReducedGraph& rg, std::vector<Pending> work, std::vector<int>& direction,
                std::vector<std::vector<int>>& out, std::size_t limit) {
  while (!work.empty() && rg.exprs()[work.back().expr].kind == ReducedGraph::ExprKind::kLink) {
    assign_link(rg, work.back(), direction);
    work.pop_back();
  }
  if (out.size() >= limit) return;
  if (work.empty()) {
    out.push_back(direction);
    return;
  }
  Pending p = work.back();
  work.pop_back();
  for (const Choice& c : local_options(rg, p)) {
    std::vector<Pending> next = work;
    next.push_back(c.first);
    if (c.second) next.push_back(*c.second);
    expand_all(rg, std::move(next), direction, out, limit);
    if (out.size() >= limit) return;
  }
}

void expand_random(const ReducedGraph& rg, std::vector<Pending> work, std::vector<int>& direction,
                   std::mt19937_64& rng) {
  while (!work.empty()) {
    Pending p = work.back();
    work.pop_back();
    if (rg.exprs()[p.expr].kind == ReducedGraph::ExprKind::kLink) {
      assign_link(rg, p, direction);
      continue;
    }
    auto opts = local_options(rg, p);
    std::uniform_int_distribution<std::size_t> pick(0, opts.size() - 1);
    const Choice& c = opts[pick(rng)];
    work.push_back(c.first);
    if (c.second) work.push_back(*c.second);
  }
}

// All states of a component's edges (0: from a, 1: from b, 2: undirected)
// that make the component a feasible orientation rooted at its source.
class ComponentEnumerator {
 public:
  ComponentEnumerator(const ReducedGraph& rg, const ReducedGraph::Component& comp)
      : rg_(rg), comp_(comp), out_adj_(rg.node_count()), indegree_(rg.node_count(), 0) {}

  /// At most `limit` results; gives up (aborted() turns true) after
  /// `max_steps` search nodes.
  std::vector<std::vector<int>> run(std::size_t limit, std::size_t max_steps) {
    limit_ = limit;
    max_steps_ = max_steps;
    states_.assign(comp_.edges.size(), 0);
    recurse(0);
    return std::move(results_);
  }

  bool aborted() const { return steps_ > max_steps_; }

 private:
  bool reaches(std::size_t from, std::size_t target) const {
    std::vector<std::size_t> stack{from};
    std::vector<bool> seen(rg_.node_count(), false);
    seen[from] = true;
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      if (u == target) return true;
      for (std::size_t v : out_adj_[u]) {
        if (!seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
    return false;
  }

  void recurse(std::size_t k) {
    if (results_.size() >= limit_ || ++steps_ > max_steps_) return;
    if (k == comp_.edges.size()) {
      for (std::size_t v : comp_.nodes) {
        if (v != comp_.source && indegree_[v] == 0) return;
      }
      results_.push_back(states_);
      return;
    }
    const auto& x = rg_.exprs()[comp_.edges[k]];
    for (int s = 0; s < 3; ++s) {
      if (s == 2) {
        if (!x.may_be_undirected) continue;
        states_[k] = 2;
        recurse(k + 1);
        continue;
      }
      std::size_t u = s == 0 ? x.a : x.b, v = s == 0 ? x.b : x.a;
      if (v == comp_.source || reaches(v, u)) continue;
      out_adj_[u].push_back(v);
      ++indegree_[v];
      states_[k] = s;
      recurse(k + 1);
      out_adj_[u].pop_back();
      --indegree_[v];
    }
  }

  const ReducedGraph& rg_;
  const ReducedGraph::Component& comp_;
  std::vector<std::vector<std::size_t>> out_adj_;
  std::vector<std::size_t> indegree_;
  std::vector<int> states_;
  std::vector<std::vector<int>> results_;
  std::size_t limit_ = 0;
  std::size_t max_steps_ = 0;
  std::size_t steps_ = 0;
};

// Uniform choice among the admissible states of every component edge.
std::vector<int> random_component_states(const ReducedGraph& rg,
                                         const ReducedGraph::Component& comp,
                                         std::mt19937_64& rng) {
  std::vector<int> states(comp.edges.size());
  for (std::size_t k = 0; k < comp.edges.size(); ++k) {
    int options = rg.exprs()[comp.edges[k]].may_be_undirected ? 3 : 2;
    states[k] = std::uniform_int_distribution<int>(0, options - 1)(rng);
  }
  return states;
}

Pending component_pending(const ReducedGraph& rg, std::size_t expr, int state) {
  const auto& x = rg.exprs()[expr];
  if (state == 2) return {expr, {false, 0}};
  return {expr, {true, state == 0 ? x.a : x.b}};
}

std::vector<Pending> fixed_work(const ReducedGraph& rg) {
  std::vector<Pending> work;
  for (const auto& b : rg.bridges()) work.push_back({b.expr, {true, b.tail}});
  for (std::size_t e : rg.loops()) work.push_back({e, {false, 0}});
  return work;
}

constexpr std::size_t kComponentEnumerationLimit = 200'000;
// Search nodes spent checking whether the feasible set fits a sample budget.
constexpr std::size_t kFitCheckSteps = 2'000'000;

// Empty optional when the component search exceeds `max_steps`.
std::optional<std::vector<Orientation>> exhaustive(const ReducedGraph& rg, std::size_t limit,
                                                   std::size_t max_steps) {
  std::vector<std::vector<std::vector<int>>> per_component;
  for (const auto& comp : rg.components()) {
    ComponentEnumerator enumerator(rg, comp);
    per_component.push_back(enumerator.run(kComponentEnumerationLimit, max_steps));
    if (enumerator.aborted()) return std::nullopt;
    if (per_component.back().empty()) return std::vector<Orientation>{};
  }
  std::vector<std::vector<int>> directions;
  std::vector<int> direction(rg.link_ends().size(), 0);
  std::vector<std::size_t> pick(per_component.size(), 0);
  while (directions.size() < limit) {
    std::vector<Pending> work = fixed_work(rg);
    for (std::size_t c = 0; c < per_component.size(); ++c) {
      const auto& comp = rg.components()[c];
      const auto& states = per_component[c][pick[c]];
      for (std::size_t k = 0; k < comp.edges.size(); ++k) {
        work.push_back(component_pending(rg, comp.edges[k], states[k]));
      }
    }
    expand_all(rg, std::move(work), direction, directions, limit);
    // Odometer over component choices.
    std::size_t c = 0;
    for (; c < pick.size(); ++c) {
      if (++pick[c] < per_component[c].size()) break;
      pick[c] = 0;
    }
    if (c == pick.size()) break;
  }
  std::vector<Orientation> out;
  out.reserve(directions.size());
  for (auto& d : directions) out.push_back({std::move(d), Provenance::kSearched});
  return out;
}

}  // namespace

OrientationSet enumerate_orientations(const ReducedGraph& rg, const EnumerationOptions& options) {
  OrientationSet result;
  if (!options.sample_budget) {
    result.orientations =
        *exhaustive(rg, options.max_orientations, std::numeric_limits<std::size_t>::max());
    result.exhaustive = result.orientations.size() < options.max_orientations;
  } else {
    const std::size_t budget = *options.sample_budget;
    // Small problems: the whole set, if it fits.
    auto all = exhaustive(rg, budget + 1, kFitCheckSteps);
    if (all && all->size() <= budget) {
      result.orientations = std::move(*all);
      result.exhaustive = true;
    } else {
      std::mt19937_64 rng(options.seed);
      std::set<std::vector<int>> seen;
      for (std::size_t draw = 0; draw < budget; ++draw) {
        std::vector<Pending> work = fixed_work(rg);
        for (const auto& comp : rg.components()) {
          auto states = random_component_states(rg, comp, rng);
          for (std::size_t k = 0; k < comp.edges.size(); ++k) {
            work.push_back(component_pending(rg, comp.edges[k], states[k]));
          }
        }
        std::vector<int> direction(rg.link_ends().size(), 0);
        expand_random(rg, std::move(work), direction, rng);
        ++result.draws;
        if (!is_feasible(direction, rg.link_ends(), rg.node_count(), rg.source())) continue;
        if (seen.insert(direction).second) {
          result.orientations.push_back({std::move(direction), Provenance::kSearched});
        }
      }
    }
  }
  for (const Orientation& o : result.orientations) {
    if (!is_feasible(o.direction, rg.link_ends(), rg.node_count(), rg.source())) {
      throw std::logic_error("orientation expansion produced an infeasible orientation");
    }
  }
  return result;
}

Orientation extract_orientation(const Solution& solution, double zero_tolerance) {
  Orientation o;
  o.provenance = Provenance::kExtracted;
  o.direction.reserve(solution.flows.size());
  for (double q : solution.flows) o.direction.push_back(q <= -zero_tolerance ? -1 : +1);
  return o;
}

}  // namespace wdn
