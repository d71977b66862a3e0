#pragma once

#include <string>
#include <vector>

#include "hits/extraction.hpp"
#include "hits/focal.hpp"
#include "hits/gateway.hpp"
#include "hits/minilang/interp.hpp"

namespace hits {

enum class FixResult { NowPassing, StillFailing, Abandoned };

struct FixAttempt {
  std::string candidate_id;
  int round = 0;  // 1..max_rounds
  minilang::RunStatus trigger_status;
  std::string trigger_message;
  std::vector<std::string> rule_fixes_applied;  // subset of the three rules
  FixResult result = FixResult::StillFailing;
  bool llm_called = false;
};

/// Append missing closers in nesting order at end of text, drop trailing
/// unmatched closers. String literals and comments are skipped. Total and
/// idempotent.
std::string balance_brackets(const std::string& source);

/// Rewrite every `assert(expr);` whose argument is not the literal `true`
/// into a scratch-variable binding that still evaluates the expression.
/// Line count and all other lines are preserved byte-for-byte. Sources
/// that do not parse pass through unchanged with `warned` set.
std::string strip_assertions(const std::string& source, bool* warned = nullptr);

/// Prepend a no-op stub (arity and parameter types inferred from the call
/// site) for every function the test calls that neither the test nor the
/// project defines.
std::string inject_preamble(const std::string& source, const Project& project);

struct SelfDebugOutcome {
  TestCandidate candidate;  // final state: Passed / RuleFixed / Abandoned
  std::vector<FixAttempt> attempts;
  minilang::ExecutionOutcome last_outcome;
  std::string abandon_reason;
};

/// Capped fix loop: every round applies the three rule fixes, re-runs, and
/// only then consults the LLM. Byte-identical resubmissions short-circuit
/// as still_failing. Gateway errors abandon the candidate.
SelfDebugOutcome self_debug_loop(
    TestCandidate candidate, const minilang::Program& program,
    const Project& project, Backend& gateway, const PromptAssets& assets,
    const std::string& context_prefix, const minilang::ExecutionLimits& limits,
    int max_rounds = 10);

}  // namespace hits
