#pragma once

#include <string>
#include <variant>
#include <vector>

#include "hits/minilang/ast.hpp"
#include "hits/slicing.hpp"

namespace hits {

enum class PayloadKind { SlicePlan, TestFile, FixedTest };

struct Payload {
  PayloadKind kind;
  std::string json_text;
  // Decoded content per kind; slice plans fill `plan`, the others `source`.
  RawSlicePlan plan;
  std::string source;
};

struct FormatError {
  enum class Kind { NoJsonBlock, ParseFailure, SchemaViolation };
  Kind kind;
  std::string detail;  // offending field for schema violations
};

/// Locate the JSON payload inside a Markdown response: fenced ```json
/// blocks first, then the longest balanced-brace region that parses.
/// Total over arbitrary input.
std::variant<Payload, FormatError> extract_payload(const std::string& raw,
                                                   PayloadKind kind);

enum class CandidateState { Fresh, RuleFixed, LlmFixed, Passed, Abandoned };

struct TestCandidate {
  std::string id;  // focal / slice index / test name / fix round
  std::string focal;
  int slice_index = 0;
  std::string test_name;
  std::string source;
  CandidateState state = CandidateState::Fresh;
  int fix_round = 0;
};

struct IsolationError {
  std::string message;
};

/// Split a multi-test file into hermetic single-test units: every
/// candidate carries the file's globals and helper functions plus exactly
/// one `test_*` function.
std::variant<std::vector<TestCandidate>, IsolationError> isolate_tests(
    const std::string& test_file_source, const std::string& focal,
    int slice_index);

const char* candidate_state_name(CandidateState s);

}  // namespace hits
