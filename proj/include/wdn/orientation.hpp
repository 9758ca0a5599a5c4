#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wdn/network.hpp"
#include "wdn/solution.hpp"

namespace wdn {

enum class Provenance { kSearched, kExtracted };

/// A flow direction per link: +1 along the link's positive direction
/// (tail -> head), -1 against it.
struct Orientation {
  std::vector<int> direction;
  Provenance provenance = Provenance::kSearched;

  /// Compact "+-+..." form, one character per link.
  std::string signature() const;
  static Orientation from_signature(std::string_view signature,
                                    Provenance provenance = Provenance::kSearched);

  bool operator==(const Orientation& other) const { return direction == other.direction; }
  bool operator<(const Orientation& other) const { return direction < other.direction; }
};

enum class FeasibilityRule { kNone, kCycle, kStarvedNode, kSourceInflow };

struct Feasibility {
  bool feasible = true;
  FeasibilityRule rule = FeasibilityRule::kNone;
  std::string reason;
  /// Node indices: the directed cycle, the starving node, or the source.
  std::vector<std::size_t> witness;

  explicit operator bool() const { return feasible; }
};

/// Acyclic, every non-source node has an incoming link, the source has none.
/// Rules are checked in that order; the first violation is reported.
Feasibility is_feasible(const Orientation& orientation, const Network& network);

/// Same check on a bare multigraph (tail, head per edge).
Feasibility is_feasible(std::span<const int> direction,
                        std::span<const std::pair<std::size_t, std::size_t>> edges,
                        std::size_t node_count, std::size_t source);

/// Result of reducing the network by repeatedly removing bridges, collapsing
/// degree-2 nodes, removing self-loops and merging parallel edges. Every
/// surviving or removed edge is an expression over original links, which is
/// what expansion replays in reverse.
class ReducedGraph {
 public:
  enum class ExprKind { kLink, kSeries, kParallel };

  struct Expr {
    ExprKind kind = ExprKind::kLink;
    std::size_t a = 0;  // endpoints (node indices)
    std::size_t b = 0;
    std::size_t link = 0;       // kLink
    std::size_t first = 0;      // kSeries: edge a-middle; kParallel: first branch
    std::size_t second = 0;     // kSeries: edge middle-b; kParallel: second branch
    std::size_t middle = 0;     // kSeries
    bool may_be_undirected = false;  // true when a sink can sit inside
  };

  enum class StepKind { kBridge, kSeries, kSelfLoop, kParallel };

  struct Step {
    StepKind kind;
    std::size_t expr = 0;         // produced (series/parallel) or removed (bridge/loop)
    std::size_t edges_after = 0;  // edge count of the working graph after the step
  };

  /// Bridge removed with its forced direction.
  struct Bridge {
    std::size_t expr = 0;
    std::size_t tail = 0;
    std::size_t head = 0;
  };

  struct Component {
    std::size_t source = 0;
    std::vector<std::size_t> nodes;
    std::vector<std::size_t> edges;  // expression ids, simple graph
  };

  std::size_t node_count() const { return node_count_; }
  std::size_t source() const { return source_; }
  std::span<const std::pair<std::size_t, std::size_t>> link_ends() const { return link_ends_; }
  std::span<const Expr> exprs() const { return exprs_; }
  std::span<const Step> steps() const { return steps_; }
  std::span<const Bridge> bridges() const { return bridges_; }
  std::span<const std::size_t> loops() const { return loops_; }
  std::span<const Component> components() const { return components_; }
  /// Edges left in the final reduced graph, summed over components.
  std::size_t edge_count() const;

 private:
  friend ReducedGraph reduce_graph(const Network& network);

  std::size_t node_count_ = 0;
  std::size_t source_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> link_ends_;  // (tail, head)
  std::vector<Expr> exprs_;
  std::vector<Step> steps_;
  std::vector<Bridge> bridges_;
  std::vector<std::size_t> loops_;
  std::vector<Component> components_;
};

ReducedGraph reduce_graph(const Network& network);

struct EnumerationOptions {
  /// Empty: exhaustive. Otherwise this many random draws (uniform state per
  /// reduced edge, uniform local choice per expansion step), of which the
  /// distinct feasible ones are kept. If the exhaustive set fits in the
  /// budget it is returned whole instead.
  std::optional<std::size_t> sample_budget;
  std::uint64_t seed = 0;
  /// Exhaustive enumeration stops after this many orientations.
  std::size_t max_orientations = 1'000'000;
};

struct OrientationSet {
  std::vector<Orientation> orientations;
  bool exhaustive = false;  // the list is the complete feasible set
  std::size_t draws = 0;    // random draws made (sampling only)
};

/// Feasible orientations of the original network, by expanding orientations
/// of the reduced graph and filtering. Every result passes is_feasible.
OrientationSet enumerate_orientations(const ReducedGraph& reduced,
                                      const EnumerationOptions& options = {});

inline constexpr double kDefaultZeroFlowTolerance = 1e-7;  // m^3/s

/// Sign of each net flow; flows below `zero_tolerance` in magnitude take +1.
Orientation extract_orientation(const Solution& solution,
                                double zero_tolerance = kDefaultZeroFlowTolerance);

}  // namespace wdn
