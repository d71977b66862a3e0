#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "hits/minilang/ast.hpp"

namespace hits::minilang {

struct ExecutionLimits {
  long long max_steps = 1'000'000;
  int max_call_depth = 256;
};

/// (function name, line, arm) — one site per if/while/for condition.
using BranchKey = std::tuple<std::string, int, bool>;

struct RawCoverage {
  std::set<std::pair<std::string, int>> covered_lines;
  std::map<BranchKey, long long> branch_hits;

  bool empty() const { return covered_lines.empty() && branch_hits.empty(); }
  void merge(const RawCoverage& other);
};

enum class RunStatus { Passed, CompileError, RuntimeError };

struct ExecutionOutcome {
  RunStatus status = RunStatus::Passed;
  std::string message;
  std::optional<int> failing_line;
  RawCoverage coverage;
  std::string printed;  // captured print() output
};

/// Line-delimited event log for the coverage oracle; one entry per
/// statement execution / condition evaluation inside the program under
/// test, independent of the RawCoverage accumulation path.
struct TraceEvent {
  enum class Kind { Statement, Branch };
  Kind kind;
  std::string function;
  int line = 0;
  bool arm = false;  // branch only
};

/// Parse and execute `test_source` against `program`. Every zero-parameter
/// function named `test_*` runs in declaration order with fresh globals.
/// Coverage counts only lines/branches inside `program`'s functions.
ExecutionOutcome run_test(const Program& program,
                          const std::string& test_source,
                          const ExecutionLimits& limits,
                          std::vector<TraceEvent>* trace = nullptr);

struct ErrorDistribution {
  double compile_fraction = 0.0;
  double runtime_fraction = 0.0;
  int compile_count = 0;
  int runtime_count = 0;
  int passed_count = 0;
};

/// Fractions of compile vs runtime errors among non-passing outcomes;
/// both zero when everything passed.
ErrorDistribution classify_outcomes(
    const std::vector<ExecutionOutcome>& outcomes);

}  // namespace hits::minilang
