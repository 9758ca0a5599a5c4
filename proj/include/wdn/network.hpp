#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wdn {

struct Node {
  std::string id;
  double elevation = 0.0;     // m
  double demand = 0.0;        // m^3/s, consumption is positive
  double min_pressure = 0.0;  // m of water column above elevation
  bool is_source = false;
};

/// An undirected pipe route. Positive flow runs from `tail` to `head`; the
/// pair is fixed at load time (lexicographically smaller node id is the tail).
struct Link {
  std::string id;
  std::size_t endpoint_a = 0;  // node indices, as given in the file
  std::size_t endpoint_b = 0;
  double length = 0.0;  // m
  std::size_t tail = 0;
  std::size_t head = 0;

  std::size_t other(std::size_t node) const { return node == tail ? head : tail; }
};

struct PipeType {
  double diameter = 0.0;   // m
  double unit_cost = 0.0;  // currency per m
  double roughness = 0.0;  // Hazen-Williams coefficient
};

inline constexpr double kDefaultHwConstant = 10.68;

/// Immutable, validated single-source network with its pipe catalog.
class Network {
 public:
  /// Validates every invariant and fixes link directions. Throws
  /// ValidationError / MultiSourceError.
  static Network create(std::string name, std::vector<Node> nodes,
                        std::vector<Link> links, std::vector<PipeType> catalog,
                        double flow_min, double flow_max,
                        double hw_constant = kDefaultHwConstant);

  const std::string& name() const { return name_; }
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Link> links() const { return links_; }
  std::span<const PipeType> catalog() const { return catalog_; }
  const Node& node(std::size_t i) const { return nodes_[i]; }
  const Link& link(std::size_t i) const { return links_[i]; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t link_count() const { return links_.size(); }
  std::size_t pipe_count() const { return catalog_.size(); }

  double flow_min() const { return flow_min_; }
  double flow_max() const { return flow_max_; }
  double hw_constant() const { return hw_constant_; }

  std::size_t source() const { return source_; }
  double total_demand() const { return total_demand_; }
  double total_length() const;
  /// Links incident to each node, in link-index order.
  const std::vector<std::size_t>& incident_links(std::size_t node) const {
    return incidence_[node];
  }

  /// Throws std::out_of_range for unknown ids.
  std::size_t node_index(std::string_view id) const;
  std::size_t link_index(std::string_view id) const;

  /// Non-fatal findings from validation (e.g. demand exceeding source capacity).
  const std::vector<std::string>& warnings() const { return warnings_; }

  bool operator==(const Network& other) const;

 private:
  Network() = default;

  std::string name_;
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<PipeType> catalog_;
  double flow_min_ = 0.0;
  double flow_max_ = 0.0;
  double hw_constant_ = kDefaultHwConstant;
  std::size_t source_ = 0;
  double total_demand_ = 0.0;
  std::vector<std::vector<std::size_t>> incidence_;
  std::unordered_map<std::string, std::size_t> node_index_;
  std::unordered_map<std::string, std::size_t> link_index_;
  std::vector<std::string> warnings_;
};

/// Reads the JSON network format. Throws ParseError, ValidationError,
/// MultiSourceError.
Network load_network(const std::string& path);
Network parse_network(std::string_view text);

/// Per-(link, pipe type) segment lengths, row-major by link.
class SegmentLengths {
 public:
  SegmentLengths() = default;
  SegmentLengths(std::size_t links, std::size_t pipes, double fill = 0.0)
      : links_(links), pipes_(pipes), values_(links * pipes, fill) {}

  std::size_t links() const { return links_; }
  std::size_t pipes() const { return pipes_; }
  double& operator()(std::size_t link, std::size_t pipe) { return values_[link * pipes_ + pipe]; }
  double operator()(std::size_t link, std::size_t pipe) const { return values_[link * pipes_ + pipe]; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double link_total(std::size_t link) const;

  bool operator==(const SegmentLengths&) const = default;

 private:
  std::size_t links_ = 0;
  std::size_t pipes_ = 0;
  std::vector<double> values_;
};

/// Sum over links and pipe types of length times unit cost. Throws
/// DimensionError when the shape does not match the network.
double network_cost(const Network& network, const SegmentLengths& lengths);

}  // namespace wdn
