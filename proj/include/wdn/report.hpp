#pragma once

#include <span>
#include <string>
#include <string_view>

#include "wdn/driver.hpp"
#include "wdn/network.hpp"
#include "wdn/solution.hpp"

namespace wdn {

struct ReportFormat {
  /// Wall-clock fields (per-run time, total time). Leave them out to compare
  /// reports of repeated batches byte for byte.
  bool include_timing = true;
};

/// JSON text of a report, aggregates included.
std::string write_report(const RunReport& report, const ReportFormat& format = {});

/// Parses a report and recomputes its aggregates from the run records.
/// Throws ParseError on malformed input, a schema version other than
/// kReportSchemaVersion, or stored aggregates that disagree with the records.
RunReport read_report(std::string_view text);
RunReport load_report(const std::string& path);

/// Plain-text table, one row per report: network, pipeline, runs, successes,
/// min/avg/std cost in units of 1e6, distinct orientations, common links,
/// total time and the feasible-orientation count of orientation search.
std::string render_table(std::span<const RunReport> reports);

/// Solution file: flows and per-pipe segment lengths keyed by link id.
std::string write_solution(const Network& network, const Solution& solution);

/// Reads a solution file against `network`. The cost is taken from the file
/// when present, otherwise computed from the segment lengths. Throws
/// ParseError (syntax, unknown or missing links) and DimensionError (wrong
/// number of segment lengths).
Solution read_solution(const Network& network, std::string_view text);
Solution load_solution(const Network& network, const std::string& path);

/// Human-readable validation summary, one line per constraint family.
std::string render_validation(const ValidationReport& report);

}  // namespace wdn
