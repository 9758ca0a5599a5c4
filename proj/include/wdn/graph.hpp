#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "wdn/network.hpp"

namespace wdn {

inline constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct SignedLink {
  std::size_t link = 0;
  int sign = 1;  // +1: traversed tail -> head

  bool operator==(const SignedLink&) const = default;
};

struct SignEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  int value = 0;
};

/// Sparse {-1, 0, +1} matrix in coordinate form, sorted by (row, col).
class SignMatrix {
 public:
  SignMatrix() = default;
  SignMatrix(std::size_t rows, std::size_t cols, std::vector<SignEntry> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const SignEntry> entries() const { return entries_; }
  std::span<const SignEntry> row(std::size_t r) const {
    return std::span(entries_).subspan(row_begin_[r], row_begin_[r + 1] - row_begin_[r]);
  }
  int at(std::size_t r, std::size_t c) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<SignEntry> entries_;
  std::vector<std::size_t> row_begin_;
};

/// Node-by-link matrix: +1 where the node is the head (sink for positive
/// flow) of the link, -1 where it is the tail.
SignMatrix build_incidence(const Network& network);

struct SpanningTree {
  std::size_t root = 0;
  std::vector<std::size_t> parent_link;  // per node; kNone for the root
  std::vector<std::size_t> parent;       // per node; kNone for the root
  std::vector<std::size_t> depth;        // hop count from the root
  std::vector<bool> in_tree;             // per link

  std::vector<std::size_t> links() const;
  /// Links from the root down to `node`, signed by whether the link's
  /// positive direction points away from the root along the path.
  std::vector<SignedLink> path_to(const Network& network, std::size_t node) const;
};

enum class TreeStrategy {
  kBreadthFirst,          // links explored in index order
  kBreadthFirstReversed,  // links explored in reverse index order
  kDepthFirst,
  kShortestLength,        // Dijkstra on link length
};

/// Breadth-first spanning tree rooted at the source. Throws DisconnectedError.
SpanningTree build_spanning_tree(const Network& network,
                                 TreeStrategy strategy = TreeStrategy::kBreadthFirst);

struct CycleBasis {
  /// One fundamental cycle per non-tree link. Each walk starts with the
  /// non-tree link in its positive direction.
  std::vector<std::vector<SignedLink>> cycles;
  SignMatrix matrix;  // cycle-by-link
};

CycleBasis build_cycle_basis(const Network& network, const SpanningTree& tree);

struct PathMatrix {
  SignMatrix matrix;  // node-by-link, root row empty
  SpanningTree tree;
};

PathMatrix build_path_matrix(const Network& network, const SpanningTree& tree);

/// Bridges of an undirected multigraph given as endpoint pairs. Parallel
/// edges are never bridges; self-loops are never bridges. Returns edge indices
/// in increasing order.
std::vector<std::size_t> find_bridges(std::size_t node_count,
                                      std::span<const std::pair<std::size_t, std::size_t>> edges);
std::vector<std::size_t> find_bridges(const Network& network);

/// Everything the formulations need, built once per network.
struct GraphStructures {
  SignMatrix incidence;
  SpanningTree tree;
  CycleBasis cycles;
  PathMatrix paths;
};

GraphStructures build_graph_structures(const Network& network);

}  // namespace wdn
