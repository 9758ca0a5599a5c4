// wdn-opt: command-line front end for the split-pipe network optimizer.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wdn/config.hpp"
#include "wdn/driver.hpp"
#include "wdn/errors.hpp"
#include "wdn/formulation.hpp"
#include "wdn/graph.hpp"
#include "wdn/orientation.hpp"
#include "wdn/report.hpp"
#include "wdn/validation.hpp"

namespace {

using nlohmann::ordered_json;
using namespace wdn;

ordered_json signed_walk(const Network& network, const std::vector<SignedLink>& walk) {
  ordered_json out = ordered_json::array();
  for (const auto& s : walk) out.push_back((s.sign > 0 ? "+" : "-") + network.link(s.link).id);
  return out;
}

int cmd_graph(const std::string& file) {
  const Network network = load_network(file);
  const GraphStructures g = build_graph_structures(network);
  ordered_json doc;
  doc["network"] = network.name();
  doc["source"] = network.node(network.source()).id;
  ordered_json tree = ordered_json::array();
  for (std::size_t j : g.tree.links()) tree.push_back(network.link(j).id);
  doc["tree_links"] = std::move(tree);
  ordered_json cycles = ordered_json::array();
  for (const auto& c : g.cycles.cycles) cycles.push_back(signed_walk(network, c));
  doc["basis_cycles"] = std::move(cycles);
  ordered_json bridges = ordered_json::array();
  for (std::size_t j : find_bridges(network)) bridges.push_back(network.link(j).id);
  doc["bridges"] = std::move(bridges);
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_model(const std::string& file, const std::string& formulation, bool dump) {
  const Network network = load_network(file);
  const NlpModel model =
      build_model(network, build_graph_structures(network),
                  formulation == "pl" ? Formulation::kParallelLink : Formulation::kDiscreteSegment);
  ordered_json doc;
  doc["network"] = network.name();
  doc["formulation"] = formulation;
  doc["variable_count"] = model.variable_count();
  doc["constraint_count"] = model.constraint_count();
  doc["jacobian_nonzeros"] = model.jacobian_structure().size();
  doc["hessian_nonzeros"] = model.hessian_structure().size();
  ordered_json census = ordered_json::object();
  for (const auto& c : model.constraints()) {
    const std::string family(to_string(c.family));
    census[family] = census.value(family, 0) + 1;
  }
  doc["constraints_by_family"] = std::move(census);
  if (dump) {
    auto bound = [](double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); };
    ordered_json vars = ordered_json::array();
    for (const auto& v : model.variables()) {
      vars.push_back({{"name", v.name}, {"lower", bound(v.lower)}, {"upper", bound(v.upper)}});
    }
    doc["variables"] = std::move(vars);
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < model.constraint_count(); ++i) {
      const Constraint& c = model.constraint(i);
      ordered_json cols = ordered_json::array();
      for (std::size_t k = model.row_begin(i); k < model.row_begin(i + 1); ++k) {
        cols.push_back(model.variables()[model.jacobian_structure()[k].second].name);
      }
      rows.push_back({{"name", c.name},
                      {"kind", c.is_equality() ? "equality" : "inequality"},
                      {"lower", bound(c.lower)},
                      {"upper", bound(c.upper)},
                      {"sparsity", std::move(cols)}});
    }
    doc["constraints"] = std::move(rows);
  }
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_orientations(const std::string& file, std::optional<std::size_t> sample, std::uint64_t seed,
                     bool list) {
  const Network network = load_network(file);
  const ReducedGraph reduced = reduce_graph(network);
  EnumerationOptions options;
  options.sample_budget = sample;
  options.seed = seed;
  const OrientationSet set = enumerate_orientations(reduced, options);
  std::cout << "network " << network.name() << "\n";
  std::cout << "reduced edges " << reduced.edge_count() << ", bridges " << reduced.bridges().size()
            << "\n";
  if (sample) std::cout << "draws " << set.draws << "\n";
  std::cout << "feasible " << set.orientations.size() << (set.exhaustive ? " (complete)" : "")
            << "\n";
  if (list) {
    for (std::size_t k = 0; k < set.orientations.size(); ++k) {
      std::cout << "orientation " << k << "\n";
      const auto& d = set.orientations[k].direction;
      for (std::size_t j = 0; j < network.link_count(); ++j) {
        const Link& l = network.link(j);
        const Node& from = network.node(d[j] > 0 ? l.tail : l.head);
        const Node& to = network.node(d[j] > 0 ? l.head : l.tail);
        std::cout << "  " << l.id << " " << (d[j] > 0 ? "+1" : "-1") << "  " << from.id << " -> "
                  << to.id << "\n";
      }
    }
  }
  return 0;
}

struct OptimizeArgs {
  std::string file;
  std::string formulation = "ds";
  std::size_t runs = 100;
  std::uint64_t seed = 1;
  std::string adapter;
  std::string out;
  std::string source_out;
  std::string solution_out;
  std::string config;
  std::optional<std::size_t> sample;
  std::size_t workers = 0;
  std::size_t max_iterations = 0;
  bool no_timing = false;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

int cmd_optimize(const OptimizeArgs& args) {
  Config config = resolve_config(args.config);
  if (!args.adapter.empty()) config.adapter = args.adapter;
  if (args.workers) config.workers = args.workers;
  if (args.max_iterations) config.max_iterations = args.max_iterations;
  const Network network = load_network(args.file);
  for (const auto& w : network.warnings()) std::cerr << "warning: " << w << "\n";
  const auto adapter = make_adapter(config.adapter, config);

  DriverOptions options;
  options.workers = config.workers;
  options.solver.max_iterations = config.max_iterations;
  const ReportFormat format{.include_timing = !args.no_timing};

  RunReport report;
  if (args.formulation == "ds" || args.formulation == "pl") {
    report = multistart(network,
                        args.formulation == "pl" ? Formulation::kParallelLink
                                                 : Formulation::kDiscreteSegment,
                        args.runs, *adapter, args.seed, options);
  } else if (args.formulation == "os") {
    report = orientation_search_pipeline(network, args.sample, *adapter, args.seed, options);
  } else {
    const RunReport source =
        multistart(network, Formulation::kDiscreteSegment, args.runs, *adapter, args.seed, options);
    if (!args.source_out.empty()) write_file(args.source_out, write_report(source, format));
    if (source.aggregates.successes == 0) {
      std::cerr << "error: the DS batch has no successful run to re-solve\n";
      return 1;
    }
    report = resolve_pipeline(source, network, *adapter, options);
  }

  const std::string text = write_report(report, format);
  if (args.out.empty()) {
    std::cout << text;
  } else {
    write_file(args.out, text);
    std::cout << render_table(std::span(&report, 1));
  }
  if (!args.solution_out.empty()) {
    if (const RunRecord* best = best_run(report)) {
      write_file(args.solution_out, write_solution(network, *best->solution));
    } else {
      std::cerr << "warning: no successful run, no solution written\n";
    }
  }
  return 0;
}

int cmd_report(const std::vector<std::string>& files, bool table) {
  std::vector<RunReport> reports;
  for (const auto& f : files) reports.push_back(load_report(f));
  if (table) {
    std::cout << render_table(reports);
  } else {
    for (const auto& r : reports) std::cout << write_report(r);
  }
  return 0;
}

int cmd_validate(const std::string& network_file, const std::string& solution_file) {
  const Network network = load_network(network_file);
  const Solution solution = load_solution(network, solution_file);
  const ValidationReport report = validate(network, solution);
  std::cout << "network " << network.name() << ", cost " << solution.cost << "\n";
  std::cout << render_validation(report);
  return report.feasible ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Split-pipe cost minimization for single-source water distribution networks"};
  app.require_subcommand(1);

  std::string file;
  auto* graph = app.add_subcommand("graph", "Spanning tree, basis cycles and bridges");
  graph->add_option("file", file, "Network file")->required()->check(CLI::ExistingFile);

  std::string formulation = "ds";
  bool dump = false;
  auto* model = app.add_subcommand("model", "Variable and constraint census of a model");
  model->add_option("file", file, "Network file")->required()->check(CLI::ExistingFile);
  model->add_option("--formulation", formulation)->check(CLI::IsMember({"ds", "pl"}));
  model->add_flag("--dump", dump, "Also list every variable and constraint row");

  std::optional<std::size_t> sample;
  std::uint64_t seed = 1;
  bool exhaustive = false;
  bool list = false;
  auto* orient = app.add_subcommand("orientations", "Feasible flow orientations");
  orient->add_option("file", file, "Network file")->required()->check(CLI::ExistingFile);
  auto* ex = orient->add_flag("--exhaustive", exhaustive, "Enumerate every feasible orientation");
  orient->add_option("--sample", sample, "Random draws instead of enumeration")->excludes(ex);
  orient->add_option("--seed", seed);
  orient->add_flag("--list", list, "Print each orientation as a link table");

  OptimizeArgs opt;
  auto* optimize = app.add_subcommand("optimize", "Run a batch and write its report");
  optimize->add_option("file", opt.file, "Network file")->required()->check(CLI::ExistingFile);
  optimize->add_option("--formulation", opt.formulation, "ds, pl, os (orientation search) or rs (re-solve)")
      ->check(CLI::IsMember({"ds", "pl", "os", "rs"}));
  optimize->add_option("--runs", opt.runs, "Random starts (ds, pl, and the DS batch of rs)")
      ->check(CLI::PositiveNumber);
  optimize->add_option("--seed", opt.seed);
  optimize->add_option("--adapter", opt.adapter, "builtin or external:ipopt");
  optimize->add_option("--out", opt.out, "Report file (stdout when omitted)");
  optimize->add_option("--source-out", opt.source_out, "rs: also write the DS batch report");
  optimize->add_option("--solution-out", opt.solution_out, "Write the best solution");
  optimize->add_option("--sample", opt.sample, "os: sample budget (exhaustive when omitted)");
  optimize->add_option("--workers", opt.workers, "Concurrent runs");
  optimize->add_option("--max-iterations", opt.max_iterations, "Per-run iteration limit");
  optimize->add_option("--config", opt.config, "Config file");
  optimize->add_flag("--no-timing", opt.no_timing, "Leave wall-clock fields out of the report");

  std::vector<std::string> reports;
  bool table = false;
  auto* report = app.add_subcommand("report", "Render stored reports");
  report->add_option("reports", reports, "Report files")->required()->check(CLI::ExistingFile);
  report->add_flag("--table", table, "Min/avg/std/time table");

  std::string network_file, solution_file;
  auto* validate = app.add_subcommand("validate", "Check a solution against the hydraulics");
  validate->add_option("network", network_file)->required()->check(CLI::ExistingFile);
  validate->add_option("solution", solution_file)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*graph) return cmd_graph(file);
    if (*model) return cmd_model(file, formulation, dump);
    if (*orient) return cmd_orientations(file, exhaustive ? std::nullopt : sample, seed, list);
    if (*optimize) return cmd_optimize(opt);
    if (*report) return cmd_report(reports, table);
    if (*validate) return cmd_validate(network_file, solution_file);
  } catch (const wdn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
