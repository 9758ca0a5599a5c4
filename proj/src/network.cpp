#include "wdn/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wdn/errors.hpp"

namespace wdn {

namespace {

using nlohmann::json;

void reject_unknown_fields(const json& object, std::initializer_list<std::string_view> allowed,
                           std::string_view where) {
  for (const auto& [key, value] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ParseError("unknown field '" + key + "' in " + std::string(where));
    }
  }
}

const json& require(const json& object, const char* key, std::string_view where) {
  auto it = object.find(key);
  if (it == object.end()) {
    throw ParseError("missing field '" + std::string(key) + "' in " + std::string(where));
  }
  return *it;
}

double as_number(const json& value, std::string_view what) {
  if (!value.is_number()) throw ParseError(std::string(what) + " must be a number");
  double v = value.get<double>();
  if (!std::isfinite(v)) throw ParseError(std::string(what) + " must be finite");
  return v;
}

std::string as_id(const json& value, std::string_view what) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  throw ParseError(std::string(what) + " must be a string or integer id");
}

double optional_number(const json& object, const char* key, double fallback, std::string_view where) {
  auto it = object.find(key);
  if (it == object.end()) return fallback;
  return as_number(*it, std::string(where) + "." + key);
}

}  // namespace

Network Network::create(std::string name, std::vector<Node> nodes, std::vector<Link> links,
                        std::vector<PipeType> catalog, double flow_min, double flow_max,
                        double hw_constant) {
  Network net;
  net.name_ = std::move(name);

  if (nodes.empty()) throw ValidationError("non-empty", "network has no nodes");
  if (catalog.empty()) throw ValidationError("non-empty", "pipe catalog is empty");

  std::size_t source_count = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    if (!net.node_index_.emplace(n.id, i).second) {
      throw ValidationError("unique-node-id", "duplicate node id '" + n.id + "'");
    }
    if (n.is_source) {
      ++source_count;
      net.source_ = i;
      if (n.demand != 0.0 || n.min_pressure != 0.0) {
        throw ValidationError("source-no-demand",
                              "source '" + n.id + "' must have zero demand and min_pressure");
      }
    }
    if (n.demand < 0.0) throw ValidationError("demand-nonnegative", "node '" + n.id + "'");
    if (n.min_pressure < 0.0) {
      throw ValidationError("min-pressure-nonnegative", "node '" + n.id + "'");
    }
  }
  if (source_count > 1) {
    throw MultiSourceError(std::to_string(source_count) + " nodes are marked as source");
  }
  if (source_count == 0) throw ValidationError("single-source", "no node is marked as source");

  net.incidence_.assign(nodes.size(), {});
  for (std::size_t j = 0; j < links.size(); ++j) {
    Link& l = links[j];
    if (!net.link_index_.emplace(l.id, j).second) {
      throw ValidationError("unique-link-id", "duplicate link id '" + l.id + "'");
    }
    if (l.endpoint_a >= nodes.size() || l.endpoint_b >= nodes.size()) {
      throw ValidationError("link-endpoints", "link '" + l.id + "' references an unknown node");
    }
    if (l.endpoint_a == l.endpoint_b) {
      throw ValidationError("no-self-loop", "link '" + l.id + "' has identical endpoints");
    }
    if (!(l.length > 0.0)) throw ValidationError("length-positive", "link '" + l.id + "'");
    bool a_first = nodes[l.endpoint_a].id < nodes[l.endpoint_b].id;
    l.tail = a_first ? l.endpoint_a : l.endpoint_b;
    l.head = a_first ? l.endpoint_b : l.endpoint_a;
    net.incidence_[l.endpoint_a].push_back(j);
    net.incidence_[l.endpoint_b].push_back(j);
  }

  for (std::size_t k = 0; k < catalog.size(); ++k) {
    const PipeType& p = catalog[k];
    if (!(p.diameter > 0.0) || !(p.unit_cost > 0.0) || !(p.roughness > 0.0)) {
      throw ValidationError("pipe-positive", "catalog entry " + std::to_string(k));
    }
    if (k > 0) {
      if (!(p.diameter > catalog[k - 1].diameter)) {
        throw ValidationError("catalog-diameter-increasing", "catalog entry " + std::to_string(k));
      }
      if (p.unit_cost < catalog[k - 1].unit_cost) {
        throw ValidationError("catalog-cost-nondecreasing", "catalog entry " + std::to_string(k));
      }
    }
  }

  if (!(flow_min >= 0.0 && flow_min < flow_max)) {
    throw ValidationError("flow-bounds", "require 0 <= flow_min < flow_max");
  }
  if (!(hw_constant > 0.0)) throw ValidationError("hw-constant-positive", "hw_constant");

  // Connectivity.
  std::vector<bool> seen(nodes.size(), false);
  std::queue<std::size_t> frontier;
  frontier.push(net.source_);
  seen[net.source_] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    std::size_t u = frontier.front();
    frontier.pop();
    for (std::size_t j : net.incidence_[u]) {
      std::size_t v = links[j].other(u);
      if (!seen[v]) {
        seen[v] = true;
        ++reached;
        frontier.push(v);
      }
    }
  }
  if (reached != nodes.size()) {
    throw ValidationError("connected", std::to_string(nodes.size() - reached) +
                                           " node(s) unreachable from the source");
  }

  net.total_demand_ = 0.0;
  for (const Node& n : nodes) net.total_demand_ += n.demand;
  double capacity = flow_max * static_cast<double>(net.incidence_[net.source_].size());
  if (net.total_demand_ > capacity) {
    std::ostringstream msg;
    msg << "total demand " << net.total_demand_ << " exceeds flow_max x source degree " << capacity;
    net.warnings_.push_back(msg.str());
  }

  net.nodes_ = std::move(nodes);
  net.links_ = std::move(links);
  net.catalog_ = std::move(catalog);
  net.flow_min_ = flow_min;
  net.flow_max_ = flow_max;
  net.hw_constant_ = hw_constant;
  return net;
}

double Network::total_length() const {
  return std::accumulate(links_.begin(), links_.end(), 0.0,
                         [](double acc, const Link& l) { return acc + l.length; });
}

std::size_t Network::node_index(std::string_view id) const {
  auto it = node_index_.find(std::string(id));
  if (it == node_index_.end()) throw std::out_of_range("unknown node id '" + std::string(id) + "'");
  return it->second;
}

std::size_t Network::link_index(std::string_view id) const {
  auto it = link_index_.find(std::string(id));
  if (it == link_index_.end()) throw std::out_of_range("unknown link id '" + std::string(id) + "'");
  return it->second;
}

bool Network::operator==(const Network& o) const {
  auto node_eq = [](const Node& a, const Node& b) {
    return a.id == b.id && a.elevation == b.elevation && a.demand == b.demand &&
           a.min_pressure == b.min_pressure && a.is_source == b.is_source;
  };
  auto link_eq = [](const Link& a, const Link& b) {
    return a.id == b.id && a.endpoint_a == b.endpoint_a && a.endpoint_b == b.endpoint_b &&
           a.length == b.length && a.tail == b.tail && a.head == b.head;
  };
  auto pipe_eq = [](const PipeType& a, const PipeType& b) {
    return a.diameter == b.diameter && a.unit_cost == b.unit_cost && a.roughness == b.roughness;
  };
  return name_ == o.name_ &&
         std::equal(nodes_.begin(), nodes_.end(), o.nodes_.begin(), o.nodes_.end(), node_eq) &&
         std::equal(links_.begin(), links_.end(), o.links_.begin(), o.links_.end(), link_eq) &&
         std::equal(catalog_.begin(), catalog_.end(), o.catalog_.begin(), o.catalog_.end(),
                    pipe_eq) &&
         flow_min_ == o.flow_min_ && flow_max_ == o.flow_max_ && hw_constant_ == o.hw_constant_;
}

Network parse_network(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed network file: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("network file must be a JSON object");
  reject_unknown_fields(doc, {"name", "units", "nodes", "links", "catalog", "bounds", "constants"},
                        "network");

  if (auto it = doc.find("units"); it != doc.end()) {
    if (!it->is_string() || it->get<std::string>() != "SI") {
      throw ValidationError("si-units", "only SI units (m, m^3/s) are accepted");
    }
  }
  std::string name;
  if (auto it = doc.find("name"); it != doc.end()) {
    if (!it->is_string()) throw ParseError("name must be a string");
    name = it->get<std::string>();
  }

  const json& jnodes = require(doc, "nodes", "network");
  if (!jnodes.is_array()) throw ParseError("nodes must be an array");
  std::vector<Node> nodes;
  for (const json& jn : jnodes) {
    if (!jn.is_object()) throw ParseError("node entries must be objects");
    reject_unknown_fields(jn, {"id", "elevation", "demand", "min_pressure", "source"}, "node");
    Node n;
    n.id = as_id(require(jn, "id", "node"), "node.id");
    n.elevation = as_number(require(jn, "elevation", "node"), "node.elevation");
    if (auto it = jn.find("source"); it != jn.end()) {
      if (!it->is_boolean()) throw ParseError("node.source must be a boolean");
      n.is_source = it->get<bool>();
    }
    if (n.is_source) {
      n.demand = optional_number(jn, "demand", 0.0, "node");
      n.min_pressure = optional_number(jn, "min_pressure", 0.0, "node");
    } else {
      n.demand = as_number(require(jn, "demand", "node '" + n.id + "'"), "node.demand");
      n.min_pressure =
          as_number(require(jn, "min_pressure", "node '" + n.id + "'"), "node.min_pressure");
    }
    nodes.push_back(std::move(n));
  }

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index.emplace(nodes[i].id, i);

  const json& jlinks = require(doc, "links", "network");
  if (!jlinks.is_array()) throw ParseError("links must be an array");
  std::vector<Link> links;
  for (const json& jl : jlinks) {
    if (!jl.is_object()) throw ParseError("link entries must be objects");
    reject_unknown_fields(jl, {"id", "from", "to", "length"}, "link");
    Link l;
    l.id = as_id(require(jl, "id", "link"), "link.id");
    auto endpoint = [&](const char* key) {
      std::string id = as_id(require(jl, key, "link '" + l.id + "'"), "link endpoint");
      auto it = index.find(id);
      if (it == index.end()) {
        throw ValidationError("link-endpoints",
                              "link '" + l.id + "' references unknown node '" + id + "'");
      }
      return it->second;
    };
    l.endpoint_a = endpoint("from");
    l.endpoint_b = endpoint("to");
    l.length = as_number(require(jl, "length", "link '" + l.id + "'"), "link.length");
    links.push_back(std::move(l));
  }

  const json& jcat = require(doc, "catalog", "network");
  if (!jcat.is_array()) throw ParseError("catalog must be an array");
  std::vector<PipeType> catalog;
  for (const json& jp : jcat) {
    if (!jp.is_object()) throw ParseError("catalog entries must be objects");
    reject_unknown_fields(jp, {"diameter", "roughness", "unit_cost"}, "catalog entry");
    PipeType p;
    p.diameter = as_number(require(jp, "diameter", "catalog entry"), "diameter");
    p.roughness = as_number(require(jp, "roughness", "catalog entry"), "roughness");
    p.unit_cost = as_number(require(jp, "unit_cost", "catalog entry"), "unit_cost");
    catalog.push_back(p);
  }

  const json& jbounds = require(doc, "bounds", "network");
  if (!jbounds.is_object()) throw ParseError("bounds must be an object");
  reject_unknown_fields(jbounds, {"flow_min", "flow_max"}, "bounds");
  double flow_min = as_number(require(jbounds, "flow_min", "bounds"), "flow_min");
  double flow_max = as_number(require(jbounds, "flow_max", "bounds"), "flow_max");

  double hw = kDefaultHwConstant;
  if (auto it = doc.find("constants"); it != doc.end()) {
    if (!it->is_object()) throw ParseError("constants must be an object");
    reject_unknown_fields(*it, {"hw_constant"}, "constants");
    hw = optional_number(*it, "hw_constant", kDefaultHwConstant, "constants");
  }

  return Network::create(std::move(name), std::move(nodes), std::move(links), std::move(catalog),
                         flow_min, flow_max, hw);
}

Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open network file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_network(buffer.str());
}

double SegmentLengths::link_total(std::size_t link) const {
  double total = 0.0;
  for (std::size_t j = 0; j < pipes_; ++j) total += (*this)(link, j);
  return total;
}

double network_cost(const Network& network, const SegmentLengths& lengths) {
  if (lengths.links() != network.link_count() || lengths.pipes() != network.pipe_count()) {
    throw DimensionError("segment lengths are " + std::to_string(lengths.links()) + "x" +
                         std::to_string(lengths.pipes()) + ", network needs " +
                         std::to_string(network.link_count()) + "x" +
                         std::to_string(network.pipe_count()));
  }
  double cost = 0.0;
  for (std::size_t i = 0; i < lengths.links(); ++i) {
    for (std::size_t j = 0; j < lengths.pipes(); ++j) {
      cost += lengths(i, j) * network.catalog()[j].unit_cost;
    }
  }
  return cost;
}

}  // namespace wdn
