#include "wdn/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wdn/errors.hpp"

namespace wdn {

namespace {

using nlohmann::ordered_json;

ordered_json optional_value(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::optional<double> read_optional(const ordered_json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

std::string read_text(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ParseError(std::string("cannot open ") + what + " '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool close(const std::optional<double>& a, const std::optional<double>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return std::abs(*a - *b) <= 1e-9 * std::max({1.0, std::abs(*a), std::abs(*b)});
}

std::string cell(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

std::string scaled(const std::optional<double>& value, double unit) {
  return value ? cell("%.3f", *value / unit) : "-";
}

}  // namespace

std::string write_report(const RunReport& report, const ReportFormat& format) {
  ordered_json doc;
  doc["schema_version"] = report.schema_version;
  doc["network"] = report.network;
  doc["link_count"] = report.link_count;
  doc["pipeline"] = report.pipeline;
  doc["seed"] = report.seed;
  doc["adapter"] = report.adapter;
  doc["status"] = report.status;
  if (report.feasible_orientations) doc["feasible_orientations"] = *report.feasible_orientations;
  if (report.orientation_draws) doc["orientation_draws"] = *report.orientation_draws;

  const Aggregates& a = report.aggregates;
  ordered_json agg;
  agg["runs"] = a.runs;
  agg["successes"] = a.successes;
  agg["min_cost"] = optional_value(a.min_cost);
  agg["avg_cost"] = optional_value(a.avg_cost);
  agg["std_cost"] = optional_value(a.std_cost);
  agg["distinct_orientations"] = a.distinct_orientations;
  agg["common_links"] = a.common_links;
  if (format.include_timing) agg["total_time"] = a.total_time;
  doc["aggregates"] = agg;

  ordered_json runs = ordered_json::array();
  for (const auto& r : report.runs) {
    ordered_json run;
    run["run"] = r.run_index;
    run["seed"] = r.seed;
    run["formulation"] = r.formulation;
    run["status"] = std::string(to_string(r.status));
    run["cost"] = optional_value(r.cost);
    run["orientation"] = r.orientation;
    if (format.include_timing) run["time"] = r.time;
    run["iterations"] = r.iterations;
    run["message"] = r.message;
    runs.push_back(std::move(run));
  }
  doc["runs"] = std::move(runs);
  return doc.dump(2) + "\n";
}

RunReport read_report(std::string_view text) {
  RunReport report;
  try {
    const ordered_json doc = ordered_json::parse(text);
    report.schema_version = doc.at("schema_version").get<int>();
    if (report.schema_version != kReportSchemaVersion) {
      throw ParseError("unsupported report schema version " +
                       std::to_string(report.schema_version));
    }
    report.network = doc.at("network").get<std::string>();
    report.link_count = doc.at("link_count").get<std::size_t>();
    report.pipeline = doc.at("pipeline").get<std::string>();
    report.seed = doc.at("seed").get<std::uint64_t>();
    report.adapter = doc.at("adapter").get<std::string>();
    report.status = doc.at("status").get<std::string>();
    if (doc.contains("feasible_orientations")) {
      report.feasible_orientations = doc["feasible_orientations"].get<std::size_t>();
    }
    if (doc.contains("orientation_draws")) {
      report.orientation_draws = doc["orientation_draws"].get<std::size_t>();
    }
    for (const auto& run : doc.at("runs")) {
      RunRecord r;
      r.run_index = run.at("run").get<std::size_t>();
      r.seed = run.at("seed").get<std::uint64_t>();
      r.formulation = run.at("formulation").get<std::string>();
      r.status = parse_solve_status(run.at("status").get<std::string>());
      r.cost = read_optional(run.at("cost"));
      r.orientation = run.at("orientation").get<std::string>();
      r.time = run.contains("time") ? run["time"].get<double>() : 0.0;
      r.iterations = run.at("iterations").get<std::size_t>();
      r.message = run.at("message").get<std::string>();
      report.runs.push_back(std::move(r));
    }

    report.aggregates = aggregate(report.runs, report.link_count);
    const ordered_json& agg = doc.at("aggregates");
    const Aggregates& a = report.aggregates;
    const bool consistent =
        agg.at("runs").get<std::size_t>() == a.runs &&
        agg.at("successes").get<std::size_t>() == a.successes &&
        close(read_optional(agg.at("min_cost")), a.min_cost) &&
        close(read_optional(agg.at("avg_cost")), a.avg_cost) &&
        close(read_optional(agg.at("std_cost")), a.std_cost) &&
        agg.at("distinct_orientations").get<std::size_t>() == a.distinct_orientations &&
        agg.at("common_links").get<std::size_t>() == a.common_links &&
        (!agg.contains("total_time") || close(agg["total_time"].get<double>(), a.total_time));
    if (!consistent) throw ParseError("report aggregates disagree with its run records");
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
  return report;
}

RunReport load_report(const std::string& path) {
  return read_report(read_text(path, "report"));
}

std::string render_table(std::span<const RunReport> reports) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %-4s %5s %5s %10s %10s %10s %8s %6s %10s %8s\n",
                "network", "run", "runs", "ok", "min(1e6)", "avg(1e6)", "std(1e5)", "distinct",
                "common", "time(s)", "OS-feas");
  out << line;
  for (const auto& r : reports) {
    const Aggregates& a = r.aggregates;
    const std::string feasible =
        r.feasible_orientations ? std::to_string(*r.feasible_orientations) : "-";
    std::snprintf(line, sizeof line, "%-12s %-4s %5zu %5zu %10s %10s %10s %8zu %6zu %10.2f %8s\n",
                  r.network.c_str(), r.pipeline.c_str(), a.runs, a.successes,
                  scaled(a.min_cost, 1e6).c_str(), scaled(a.avg_cost, 1e6).c_str(),
                  scaled(a.std_cost, 1e5).c_str(), a.distinct_orientations, a.common_links,
                  a.total_time, feasible.c_str());
    out << line;
  }
  return out.str();
}

std::string write_solution(const Network& network, const Solution& solution) {
  if (solution.flows.size() != network.link_count() ||
      solution.segment_lengths.links() != network.link_count() ||
      solution.segment_lengths.pipes() != network.pipe_count()) {
    throw DimensionError("solution shape does not match network '" + network.name() + "'");
  }
  ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["network"] = network.name();
  doc["formulation"] = solution.formulation;
  doc["cost"] = solution.cost;
  ordered_json flows = ordered_json::object();
  ordered_json lengths = ordered_json::object();
  for (std::size_t i = 0; i < network.link_count(); ++i) {
    const std::string& id = network.link(i).id;
    flows[id] = solution.flows[i];
    ordered_json row = ordered_json::array();
    for (std::size_t k = 0; k < network.pipe_count(); ++k) row.push_back(solution.segment_lengths(i, k));
    lengths[id] = std::move(row);
  }
  doc["flows"] = std::move(flows);
  doc["segment_lengths"] = std::move(lengths);
  return doc.dump(2) + "\n";
}

Solution read_solution(const Network& network, std::string_view text) {
  Solution s;
  s.flows.assign(network.link_count(), 0.0);
  s.segment_lengths = SegmentLengths(network.link_count(), network.pipe_count());
  try {
    const ordered_json doc = ordered_json::parse(text);
    const ordered_json& flows = doc.at("flows");
    const ordered_json& lengths = doc.at("segment_lengths");
    if (flows.size() != network.link_count() || lengths.size() != network.link_count()) {
      throw ParseError("solution must list every link exactly once");
    }
    for (const auto& [id, q] : flows.items()) s.flows[network.link_index(id)] = q.get<double>();
    for (const auto& [id, row] : lengths.items()) {
      const std::size_t i = network.link_index(id);
      if (row.size() != network.pipe_count()) {
        throw DimensionError("link '" + id + "' lists " + std::to_string(row.size()) +
                             " segment lengths, catalog has " +
                             std::to_string(network.pipe_count()));
      }
      for (std::size_t k = 0; k < network.pipe_count(); ++k) s.segment_lengths(i, k) = row[k].get<double>();
    }
    s.formulation = doc.value("formulation", std::string());
    s.cost = doc.contains("cost") ? doc["cost"].get<double>()
                                  : network_cost(network, s.segment_lengths);
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("malformed solution: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw ParseError(std::string("solution names an unknown link: ") + e.what());
  }
  return s;
}

Solution load_solution(const Network& network, const std::string& path) {
  return read_solution(network, read_text(path, "solution"));
}

std::string render_validation(const ValidationReport& report) {
  std::ostringstream out;
  char line[256];
  for (const auto& f : report.families) {
    std::snprintf(line, sizeof line, "%-18s worst %.3e  tol %.1e  %s%s%s\n", f.family.c_str(),
                  f.worst, f.tolerance, f.ok() ? "ok" : "VIOLATED",
                  f.location.empty() ? "" : "  at ", f.location.c_str());
    out << line;
  }
  out << "verdict: " << (report.feasible ? "feasible" : "infeasible") << "\n";
  return out.str();
}

}  // namespace wdn
