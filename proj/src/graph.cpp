#include "wdn/graph.hpp"

#include <algorithm>
#include <queue>

#include "wdn/errors.hpp"

namespace wdn {

SignMatrix::SignMatrix(std::size_t rows, std::size_t cols, std::vector<SignEntry> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)), row_begin_(rows + 1, 0) {
  std::sort(entries_.begin(), entries_.end(), [](const SignEntry& a, const SignEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (const SignEntry& e : entries_) ++row_begin_[e.row + 1];
  for (std::size_t r = 0; r < rows; ++r) row_begin_[r + 1] += row_begin_[r];
}

int SignMatrix::at(std::size_t r, std::size_t c) const {
  for (const SignEntry& e : row(r)) {
    if (e.col == c) return e.value;
  }
  return 0;
}

SignMatrix build_incidence(const Network& network) {
  std::vector<SignEntry> entries;
  entries.reserve(2 * network.link_count());
  for (std::size_t j = 0; j < network.link_count(); ++j) {
    const Link& l = network.link(j);
    entries.push_back({l.head, j, +1});
    entries.push_back({l.tail, j, -1});
  }
  return SignMatrix(network.node_count(), network.link_count(), std::move(entries));
}

std::vector<std::size_t> SpanningTree::links() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < in_tree.size(); ++j) {
    if (in_tree[j]) out.push_back(j);
  }
  return out;
}

std::vector<SignedLink> SpanningTree::path_to(const Network& network, std::size_t node) const {
  std::vector<SignedLink> path;
  for (std::size_t v = node; v != root; v = parent[v]) {
    std::size_t j = parent_link[v];
    path.push_back({j, network.link(j).head == v ? +1 : -1});
  }
  std::reverse(path.begin(), path.end());
  return path;
}

SpanningTree build_spanning_tree(const Network& network, TreeStrategy strategy) {
  const std::size_t n = network.node_count();
  SpanningTree tree;
  tree.root = network.source();
  tree.parent_link.assign(n, kNone);
  tree.parent.assign(n, kNone);
  tree.depth.assign(n, 0);
  tree.in_tree.assign(network.link_count(), false);
  std::vector<bool> reached(n, false);
  reached[tree.root] = true;

  auto attach = [&](std::size_t v, std::size_t from, std::size_t j) {
    reached[v] = true;
    tree.parent[v] = from;
    tree.parent_link[v] = j;
    tree.depth[v] = tree.depth[from] + 1;
    tree.in_tree[j] = true;
  };

  switch (strategy) {
    case TreeStrategy::kBreadthFirst:
    case TreeStrategy::kBreadthFirstReversed: {
      std::queue<std::size_t> frontier;
      frontier.push(tree.root);
      while (!frontier.empty()) {
        std::size_t u = frontier.front();
        frontier.pop();
        std::vector<std::size_t> order = network.incident_links(u);
        if (strategy == TreeStrategy::kBreadthFirstReversed) std::reverse(order.begin(), order.end());
        for (std::size_t j : order) {
          std::size_t v = network.link(j).other(u);
          if (!reached[v]) {
            attach(v, u, j);
            frontier.push(v);
          }
        }
      }
      break;
    }
    case TreeStrategy::kDepthFirst: {
      // Explicit stack of (node, next incident position).
      std::vector<std::pair<std::size_t, std::size_t>> stack{{tree.root, 0}};
      while (!stack.empty()) {
        auto& [u, pos] = stack.back();
        const auto& inc = network.incident_links(u);
        if (pos == inc.size()) {
          stack.pop_back();
          continue;
        }
        std::size_t j = inc[pos++];
        std::size_t v = network.link(j).other(u);
        if (!reached[v]) {
          attach(v, u, j);
          stack.emplace_back(v, 0);
        }
      }
      break;
    }
    case TreeStrategy::kShortestLength: {
      std::vector<double> dist(n, std::numeric_limits<double>::infinity());
      std::vector<bool> done(n, false);
      using Item = std::pair<double, std::size_t>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
      dist[tree.root] = 0.0;
      heap.emplace(0.0, tree.root);
      while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (done[u]) continue;
        done[u] = true;
        if (u != tree.root) {
          reached[u] = true;
          tree.in_tree[tree.parent_link[u]] = true;
          tree.depth[u] = tree.depth[tree.parent[u]] + 1;
        }
        for (std::size_t j : network.incident_links(u)) {
          std::size_t v = network.link(j).other(u);
          double nd = d + network.link(j).length;
          if (!done[v] && nd < dist[v]) {
            dist[v] = nd;
            tree.parent[v] = u;
            tree.parent_link[v] = j;
            heap.emplace(nd, v);
          }
        }
      }
      break;
    }
  }

  if (std::count(reached.begin(), reached.end(), true) != static_cast<std::ptrdiff_t>(n)) {
    throw DisconnectedError("network is not connected");
  }
  return tree;
}

CycleBasis build_cycle_basis(const Network& network, const SpanningTree& tree) {
  CycleBasis basis;
  std::vector<SignEntry> entries;
  for (std::size_t e = 0; e < network.link_count(); ++e) {
    if (tree.in_tree[e]) continue;
    const Link& l = network.link(e);
    auto to_tail = tree.path_to(network, l.tail);
    auto to_head = tree.path_to(network, l.head);
    std::size_t common = 0;
    while (common < to_tail.size() && common < to_head.size() &&
           to_tail[common].link == to_head[common].link) {
      ++common;
    }
    // Walk: tail -> head over e, head up to the common ancestor, down to tail.
    std::vector<SignedLink> cycle{{e, +1}};
    for (std::size_t k = to_head.size(); k-- > common;) {
      cycle.push_back({to_head[k].link, -to_head[k].sign});
    }
    for (std::size_t k = common; k < to_tail.size(); ++k) cycle.push_back(to_tail[k]);
    std::size_t row = basis.cycles.size();
    for (const SignedLink& s : cycle) entries.push_back({row, s.link, s.sign});
    basis.cycles.push_back(std::move(cycle));
  }
  basis.matrix = SignMatrix(basis.cycles.size(), network.link_count(), std::move(entries));
  return basis;
}

PathMatrix build_path_matrix(const Network& network, const SpanningTree& tree) {
  std::vector<SignEntry> entries;
  for (std::size_t i = 0; i < network.node_count(); ++i) {
    for (const SignedLink& s : tree.path_to(network, i)) entries.push_back({i, s.link, s.sign});
  }
  return {SignMatrix(network.node_count(), network.link_count(), std::move(entries)), tree};
}

std::vector<std::size_t> find_bridges(std::size_t node_count,
                                      std::span<const std::pair<std::size_t, std::size_t>> edges) {
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(node_count);  // (nbr, edge)
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto [u, v] = edges[e];
    if (u == v) continue;
    adj[u].emplace_back(v, e);
    adj[v].emplace_back(u, e);
  }
  std::vector<std::size_t> disc(node_count, kNone), low(node_count, 0);
  std::vector<std::size_t> bridges;
  std::size_t timer = 0;

  struct Frame {
    std::size_t node;
    std::size_t via_edge;
    std::size_t next = 0;
  };
  for (std::size_t start = 0; start < node_count; ++start) {
    if (disc[start] != kNone) continue;
    std::vector<Frame> stack{{start, kNone}};
    disc[start] = low[start] = timer++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next < adj[f.node].size()) {
        auto [v, e] = adj[f.node][f.next++];
        if (e == f.via_edge) continue;  // skip only the edge we came in on
        if (disc[v] == kNone) {
          disc[v] = low[v] = timer++;
          stack.push_back({v, e});
        } else {
          low[f.node] = std::min(low[f.node], disc[v]);
        }
        continue;
      }
      Frame done = f;
      stack.pop_back();
      if (!stack.empty()) {
        std::size_t parent = stack.back().node;
        low[parent] = std::min(low[parent], low[done.node]);
        if (low[done.node] > disc[parent]) bridges.push_back(done.via_edge);
      }
    }
  }
  std::sort(bridges.begin(), bridges.end());
  return bridges;
}

std::vector<std::size_t> find_bridges(const Network& network) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  edges.reserve(network.link_count());
  for (const Link& l : network.links()) edges.emplace_back(l.tail, l.head);
  return find_bridges(network.node_count(), edges);
}

GraphStructures build_graph_structures(const Network& network) {
  GraphStructures g;
  g.incidence = build_incidence(network);
  g.tree = build_spanning_tree(network);
  g.cycles = build_cycle_basis(network, g.tree);
  g.paths = build_path_matrix(network, g.tree);
  return g;
}

}  // namespace wdn
