#include "hits/slicing.hpp"

#include <algorithm>
#include <sstream>

namespace hits {

using boost::multiprecision::cpp_int;

std::string normalize_ws_line(const std::string& line) {
  std::string out;
  bool in_run = false;
  for (char c : line) {
    if (c == ' ' || c == '\t') {
      in_run = true;
      continue;
    }
    if (in_run && !out.empty()) out += ' ';
    in_run = false;
    out.push_back(c);
  }
  return out;
}

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\r') continue;
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
      continue;
    }
    cur.push_back(c);
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

struct BodyLine {
  int line_no;
  std::string normalized;
};

/// Non-blank focal lines in order, with absolute line numbers.
std::vector<BodyLine> body_lines(const FocalMethod& focal) {
  std::vector<BodyLine> out;
  auto lines = split_lines(focal.source_text);
  for (size_t i = 0; i < lines.size(); ++i) {
    std::string norm = normalize_ws_line(lines[i]);
    if (norm.empty()) continue;
    out.push_back({focal.first_line + (int)i, std::move(norm)});
  }
  return out;
}

std::vector<std::string> normalized_segment(const std::string& code) {
  std::vector<std::string> out;
  for (const auto& line : split_lines(code)) {
    std::string norm = normalize_ws_line(line);
    if (!norm.empty()) out.push_back(std::move(norm));
  }
  return out;
}

/// First contiguous match of `segment` in `body` at or after `from`.
std::optional<std::pair<int, int>> find_segment(
    const std::vector<BodyLine>& body, const std::vector<std::string>& segment,
    size_t from, size_t* match_end) {
  if (segment.empty()) return std::nullopt;
  for (size_t start = from; start + segment.size() <= body.size(); ++start) {
    bool ok = true;
    for (size_t k = 0; k < segment.size(); ++k) {
      if (body[start + k].normalized != segment[k]) {
        ok = false;
        break;
      }
    }
    if (ok) {
      if (match_end) *match_end = start + segment.size();
      return std::make_pair(body[start].line_no,
                            body[start + segment.size() - 1].line_no);
    }
  }
  return std::nullopt;
}

}  // namespace

std::variant<SlicePlan, SliceValidationError> validate_slice_plan(
    const RawSlicePlan& raw, const FocalMethod& focal,
    const minilang::FunctionDecl& fn) {
  if (raw.slices.empty())
    return SliceValidationError{SliceValidationError::Kind::EmptyPlan, 0,
                                "plan contains no slices"};
  auto body = body_lines(focal);
  SlicePlan plan;
  plan.focal = focal.qualified_name;
  plan.origin = SliceOrigin::Llm;

  size_t cursor = 0;
  for (size_t i = 0; i < raw.slices.size(); ++i) {
    const RawSlice& rs = raw.slices[i];
    auto segment = normalized_segment(rs.code);
    size_t end = cursor;
    auto span = find_segment(body, segment, cursor, &end);
    if (!span) {
      // Distinguish a segment that exists earlier (overlap / out of order)
      // from one that exists nowhere.
      if (find_segment(body, segment, 0, nullptr))
        return SliceValidationError{
            SliceValidationError::Kind::Overlap, (int)i + 1,
            "slice " + std::to_string(i + 1) +
                " overlaps or reorders previously recited code"};
      return SliceValidationError{
          SliceValidationError::Kind::UnlocatableSegment, (int)i + 1,
          "slice " + std::to_string(i + 1) +
              " recites code not present in the focal method"};
    }
    cursor = end;
    Slice s;
    s.index = (int)i + 1;
    s.description = rs.description;
    s.recited_code = rs.code;
    s.first_line = span->first;
    s.last_line = span->second;
    plan.slices.push_back(std::move(s));
  }

  // Every executable line must fall inside some resolved span.
  auto exec_lines = minilang::statement_lines(fn);
  for (int line : exec_lines) {
    bool covered = false;
    for (const auto& s : plan.slices) {
      if (line >= s.first_line && line <= s.last_line) {
        covered = true;
        break;
      }
    }
    if (!covered) {
      int after = (int)plan.slices.size();
      for (const auto& s : plan.slices) {
        if (s.first_line > line) {
          after = s.index;
          break;
        }
      }
      return SliceValidationError{
          SliceValidationError::Kind::Gap, after,
          "executable line " + std::to_string(line) +
              " is not covered by any slice"};
    }
  }
  return plan;
}

SlicePlan fallback_slice(const FocalMethod& focal,
                         const minilang::FunctionDecl& fn,
                         int target_decisions_per_slice) {
  SlicePlan plan;
  plan.focal = focal.qualified_name;
  plan.origin = SliceOrigin::Fallback;

  auto lines = split_lines(focal.source_text);
  auto verbatim = [&](int first, int last) {
    std::string out;
    for (int l = first; l <= last; ++l) {
      int idx = l - focal.first_line;
      if (idx >= 0 && idx < (int)lines.size()) {
        out += lines[idx];
        out += '\n';
      }
    }
    return out;
  };

  struct Group {
    int first = 0, last = 0;
  };
  std::vector<Group> groups;
  Group cur;
  int acc = 0;
  for (const auto& sp : fn.body.stmts) {
    if (cur.first == 0) cur.first = sp->line;
    cur.last = sp->end_line;
    acc += minilang::statement_decisions(*sp);
    if (acc >= target_decisions_per_slice) {
      groups.push_back(cur);
      cur = Group{};
      acc = 0;
    }
  }
  if (cur.first != 0) groups.push_back(cur);
  if (groups.empty())
    groups.push_back({fn.body.open_line, fn.body.close_line});

  for (size_t i = 0; i < groups.size(); ++i) {
    Slice s;
    s.index = (int)i + 1;
    s.first_line = groups[i].first;
    s.last_line = groups[i].last;
    s.recited_code = verbatim(s.first_line, s.last_line);
    s.description = "Step " + std::to_string(i + 1) + ": lines " +
                    std::to_string(s.first_line) + "-" +
                    std::to_string(s.last_line) + " of " + focal.function_name;
    plan.slices.push_back(std::move(s));
  }
  return plan;
}

SliceComplexityEstimate estimate_conditions(const SlicePlan& plan,
                                            const minilang::FunctionDecl& fn) {
  auto decisions = minilang::decision_lines(fn);
  std::vector<long long> counts;
  for (const auto& s : plan.slices) {
    long long d = std::count_if(decisions.begin(), decisions.end(),
                                [&](int line) {
                                  return line >= s.first_line &&
                                         line <= s.last_line;
                                });
    if (d > 20) d = 20;  // overflow guard on the per-slice exponent
    counts.push_back(std::max<long long>(1, 1LL << d));
  }
  return estimate_from_counts(counts);
}

SliceComplexityEstimate estimate_from_counts(
    const std::vector<long long>& counts) {
  SliceComplexityEstimate est;
  for (long long n : counts) {
    est.per_slice_conditions.emplace_back(n);
    est.sum += n;
    est.product *= n;
  }
  if (counts.empty()) est.product = 0;
  return est;
}

}  // namespace hits
