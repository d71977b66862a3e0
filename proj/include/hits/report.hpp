#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hits/extraction.hpp"

namespace hits {

struct FocalReport {
  std::string qualified_name;
  int line_covered = 0;
  int line_total = 0;
  int branch_covered = 0;  // covered branch arms
  int branch_total = 0;    // 2 arms per site
  int candidates_total = 0;
  int candidates_passed = 0;
  int compile_errors = 0;  // final outcomes of failed candidates
  int runtime_errors = 0;
  int callee_lines_covered = 0;  // informational, outside the focal method
  bool errored = false;
  std::string error_message;
};

struct CoverageReport {
  std::string project;
  std::vector<FocalReport> methods;
};

/// Percentage rounded half-up to 2 decimals; 0 when total is 0.
double percentage(int covered, int total);

/// Fraction of passing candidates; nullopt (reported "N/A") for an empty
/// suite.
std::optional<double> pass_rate(const std::vector<CandidateState>& states);

std::optional<double> method_pass_rate(const FocalReport& m);

/// Unweighted means over focal methods (methods without candidates are
/// excluded from the pass-rate mean only).
double avg_line_pct(const CoverageReport& r);
double avg_branch_pct(const CoverageReport& r);
std::optional<double> avg_pass_rate(const CoverageReport& r);

enum class ReportFormat { Text, Csv, Json };

/// Four tables: line coverage, branch coverage, pass rate, error
/// distribution, each with per-method rows and an Avg. row. Csv/Json are
/// lossless encodings of the same counters.
std::string render_report(const CoverageReport& report, ReportFormat fmt);

CoverageReport report_from_json(const std::string& json_text);

}  // namespace hits
