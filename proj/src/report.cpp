#include "hits/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

namespace hits {

using nlohmann::json;

double percentage(int covered, int total) {
  if (total <= 0) return 0.0;
  double pct = 100.0 * covered / total;
  return std::floor(pct * 100.0 + 0.5) / 100.0;
}

std::optional<double> pass_rate(const std::vector<CandidateState>& states) {
  if (states.empty()) return std::nullopt;
  int passed = 0;
  for (auto s : states)
    if (s == CandidateState::Passed) ++passed;
  return double(passed) / states.size();
}

std::optional<double> method_pass_rate(const FocalReport& m) {
  if (m.candidates_total == 0) return std::nullopt;
  return double(m.candidates_passed) / m.candidates_total;
}

double avg_line_pct(const CoverageReport& r) {
  if (r.methods.empty()) return 0.0;
  double sum = 0;
  for (const auto& m : r.methods) sum += percentage(m.line_covered, m.line_total);
  return std::floor(sum / r.methods.size() * 100.0 + 0.5) / 100.0;
}

double avg_branch_pct(const CoverageReport& r) {
  if (r.methods.empty()) return 0.0;
  double sum = 0;
  for (const auto& m : r.methods)
    sum += percentage(m.branch_covered, m.branch_total);
  return std::floor(sum / r.methods.size() * 100.0 + 0.5) / 100.0;
}

std::optional<double> avg_pass_rate(const CoverageReport& r) {
  double sum = 0;
  int n = 0;
  for (const auto& m : r.methods) {
    if (auto pr = method_pass_rate(m)) {
      sum += *pr;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

namespace {

std::string pct_str(double pct) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << pct << "%";
  return out.str();
}

std::string rate_str(std::optional<double> rate) {
  if (!rate) return "N/A";
  return pct_str(std::floor(*rate * 100.0 * 100.0 + 0.5) / 100.0);
}

struct Dist {
  int compile = 0, runtime = 0;
  std::string compile_str() const {
    int failed = compile + runtime;
    if (failed == 0) return "N/A";
    return pct_str(std::floor(100.0 * compile / failed * 100.0 + 0.5) / 100.0);
  }
  std::string runtime_str() const {
    int failed = compile + runtime;
    if (failed == 0) return "N/A";
    return pct_str(std::floor(100.0 * runtime / failed * 100.0 + 0.5) / 100.0);
  }
};

void table(std::ostringstream& out, const std::string& title,
           const std::vector<std::vector<std::string>>& rows) {
  out << title << "\n";
  std::vector<size_t> widths;
  for (const auto& row : rows) {
    if (widths.size() < row.size()) widths.resize(row.size());
    for (size_t i = 0; i < row.size(); ++i)
      widths[i] = std::max(widths[i], row[i].size());
  }
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t i = 0; i < rows[r].size(); ++i) {
      out << std::left << std::setw((int)widths[i] + 2) << rows[r][i];
    }
    out << "\n";
    if (r == 0) {
      size_t total = 0;
      for (size_t w : widths) total += w + 2;
      out << std::string(total, '-') << "\n";
    }
  }
  out << "\n";
}

std::string render_text(const CoverageReport& r) {
  std::ostringstream out;
  out << "Project: " << r.project << "\n\n";

  std::vector<std::vector<std::string>> line_rows = {
      {"Method", "Lines", "Line Coverage"}};
  std::vector<std::vector<std::string>> branch_rows = {
      {"Method", "Branch Arms", "Branch Coverage"}};
  std::vector<std::vector<std::string>> pass_rows = {
      {"Method", "Tests", "Passed", "Pass Rate"}};
  std::vector<std::vector<std::string>> err_rows = {
      {"Method", "Comp. Error", "Run. Error"}};

  Dist overall;
  for (const auto& m : r.methods) {
    std::string name = m.qualified_name + (m.errored ? " (errored)" : "");
    line_rows.push_back({name,
                         std::to_string(m.line_covered) + "/" +
                             std::to_string(m.line_total),
                         pct_str(percentage(m.line_covered, m.line_total))});
    branch_rows.push_back(
        {name,
         std::to_string(m.branch_covered) + "/" + std::to_string(m.branch_total),
         pct_str(percentage(m.branch_covered, m.branch_total))});
    pass_rows.push_back({name, std::to_string(m.candidates_total),
                         std::to_string(m.candidates_passed),
                         rate_str(method_pass_rate(m))});
    Dist d{m.compile_errors, m.runtime_errors};
    err_rows.push_back({name, d.compile_str(), d.runtime_str()});
    overall.compile += m.compile_errors;
    overall.runtime += m.runtime_errors;
  }
  line_rows.push_back({"Avg.", "", pct_str(avg_line_pct(r))});
  branch_rows.push_back({"Avg.", "", pct_str(avg_branch_pct(r))});
  pass_rows.push_back({"Avg.", "", "", rate_str(avg_pass_rate(r))});
  err_rows.push_back({"Avg.", overall.compile_str(), overall.runtime_str()});

  table(out, "Line Coverage on Complex Methods", line_rows);
  table(out, "Branch Coverage on Complex Methods", branch_rows);
  table(out, "Pass Rate on Complex Methods", pass_rows);
  table(out, "Non-executable Test Distribution", err_rows);
  return out.str();
}

json method_to_json(const FocalReport& m) {
  json j{{"qualified_name", m.qualified_name},
         {"line_covered", m.line_covered},
         {"line_total", m.line_total},
         {"branch_covered", m.branch_covered},
         {"branch_total", m.branch_total},
         {"candidates_total", m.candidates_total},
         {"candidates_passed", m.candidates_passed},
         {"compile_errors", m.compile_errors},
         {"runtime_errors", m.runtime_errors},
         {"callee_lines_covered", m.callee_lines_covered},
         {"errored", m.errored},
         {"line_pct", percentage(m.line_covered, m.line_total)},
         {"branch_pct", percentage(m.branch_covered, m.branch_total)}};
  if (m.errored) j["error_message"] = m.error_message;
  if (auto pr = method_pass_rate(m)) j["pass_rate"] = *pr;
  return j;
}

std::string render_json(const CoverageReport& r) {
  json j{{"version", 1}, {"project", r.project}};
  j["methods"] = json::array();
  for (const auto& m : r.methods) j["methods"].push_back(method_to_json(m));
  json avgs{{"line_pct", avg_line_pct(r)}, {"branch_pct", avg_branch_pct(r)}};
  if (auto pr = avg_pass_rate(r)) avgs["pass_rate"] = *pr;
  j["averages"] = avgs;
  int compile = 0, runtime = 0;
  for (const auto& m : r.methods) {
    compile += m.compile_errors;
    runtime += m.runtime_errors;
  }
  int failed = compile + runtime;
  j["error_distribution"] = {
      {"compile_errors", compile},
      {"runtime_errors", runtime},
      {"compile_fraction", failed ? double(compile) / failed : 0.0},
      {"runtime_fraction", failed ? double(runtime) / failed : 0.0}};
  return j.dump(2) + "\n";
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

std::string render_csv(const CoverageReport& r) {
  std::ostringstream out;
  out << "qualified_name,line_covered,line_total,branch_covered,branch_total,"
         "candidates_total,candidates_passed,compile_errors,runtime_errors,"
         "callee_lines_covered,errored\n";
  for (const auto& m : r.methods) {
    out << csv_escape(m.qualified_name) << ',' << m.line_covered << ','
        << m.line_total << ',' << m.branch_covered << ',' << m.branch_total
        << ',' << m.candidates_total << ',' << m.candidates_passed << ','
        << m.compile_errors << ',' << m.runtime_errors << ','
        << m.callee_lines_covered << ',' << (m.errored ? 1 : 0) << "\n";
  }
  return out.str();
}

}  // namespace

std::string render_report(const CoverageReport& report, ReportFormat fmt) {
  switch (fmt) {
    case ReportFormat::Text: return render_text(report);
    case ReportFormat::Csv: return render_csv(report);
    case ReportFormat::Json: return render_json(report);
  }
  return "";
}

CoverageReport report_from_json(const std::string& json_text) {
  CoverageReport r;
  json j = json::parse(json_text);
  r.project = j.value("project", "");
  for (const auto& m : j["methods"]) {
    FocalReport fm;
    fm.qualified_name = m.value("qualified_name", "");
    fm.line_covered = m.value("line_covered", 0);
    fm.line_total = m.value("line_total", 0);
    fm.branch_covered = m.value("branch_covered", 0);
    fm.branch_total = m.value("branch_total", 0);
    fm.candidates_total = m.value("candidates_total", 0);
    fm.candidates_passed = m.value("candidates_passed", 0);
    fm.compile_errors = m.value("compile_errors", 0);
    fm.runtime_errors = m.value("runtime_errors", 0);
    fm.callee_lines_covered = m.value("callee_lines_covered", 0);
    fm.errored = m.value("errored", false);
    fm.error_message = m.value("error_message", "");
    r.methods.push_back(std::move(fm));
  }
  return r;
}

}  // namespace hits
