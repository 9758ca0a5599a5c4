#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wdn/network.hpp"

namespace wdn {

/// A candidate network design: net flow per link (signed w.r.t. the link's
/// positive direction) and the pipe segments laid in each link.
struct Solution {
  std::vector<double> flows;
  SegmentLengths segment_lengths;
  double cost = 0.0;
  std::string formulation;  // "ds", "pl", "rs-ds", ...
  /// Present for parallel-link solutions; flows == forward - reverse.
  std::optional<std::vector<double>> forward_flows;
  std::optional<std::vector<double>> reverse_flows;
  std::uint64_t seed = 0;
  std::size_t run_index = 0;
};

}  // namespace wdn
