#include "hits/extraction.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

#include "hits/minilang/parser.hpp"
#include "hits/minilang/printer.hpp"

namespace hits {

namespace {

using nlohmann::json;

/// Contents of every fenced block whose info string starts with "json",
/// plus (as a lower-priority tier) untagged fenced blocks.
std::vector<std::string> fenced_json_blocks(const std::string& raw) {
  std::vector<std::string> tagged, untagged;
  size_t pos = 0;
  while (true) {
    size_t open = raw.find("```", pos);
    if (open == std::string::npos) break;
    size_t info_end = raw.find('\n', open + 3);
    if (info_end == std::string::npos) break;
    std::string info = raw.substr(open + 3, info_end - open - 3);
    size_t close = raw.find("```", info_end + 1);
    if (close == std::string::npos) break;
    std::string body = raw.substr(info_end + 1, close - info_end - 1);
    // trim trailing newline kept before the closing fence
    if (info.rfind("json", 0) == 0)
      tagged.push_back(body);
    else if (info.empty() || info == "\r")
      untagged.push_back(body);
    pos = close + 3;
  }
  tagged.insert(tagged.end(), untagged.begin(), untagged.end());
  return tagged;
}

/// Longest balanced top-level {...} region, string-literal aware.
std::vector<std::string> balanced_brace_regions(const std::string& raw) {
  std::vector<std::string> regions;
  for (size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] != '{') continue;
    int depth = 0;
    bool in_str = false;
    for (size_t j = i; j < raw.size(); ++j) {
      char c = raw[j];
      if (in_str) {
        if (c == '\\') {
          ++j;
          continue;
        }
        if (c == '"') in_str = false;
        continue;
      }
      if (c == '"') {
        in_str = true;
        continue;
      }
      if (c == '{') ++depth;
      if (c == '}') {
        --depth;
        if (depth == 0) {
          regions.push_back(raw.substr(i, j - i + 1));
          i = j;
          break;
        }
      }
    }
  }
  std::sort(regions.begin(), regions.end(),
            [](const std::string& a, const std::string& b) {
              return a.size() > b.size();
            });
  return regions;
}

std::variant<Payload, FormatError> decode(const std::string& text,
                                          PayloadKind kind) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    return FormatError{FormatError::Kind::ParseFailure,
                       "JSON block does not parse"};
  Payload payload;
  payload.kind = kind;
  payload.json_text = text;
  auto violation = [](const std::string& field) {
    return FormatError{FormatError::Kind::SchemaViolation, field};
  };
  if (kind == PayloadKind::SlicePlan) {
    if (!j.is_object() || !j.contains("slices") || !j["slices"].is_array())
      return violation("slices");
    if (j.contains("summary") && j["summary"].is_string())
      payload.plan.summary = j["summary"].get<std::string>();
    const auto& slices = j["slices"];
    for (size_t i = 0; i < slices.size(); ++i) {
      const auto& s = slices[i];
      std::string at = "slices[" + std::to_string(i) + "]";
      if (!s.is_object()) return violation(at);
      if (!s.contains("index") || !s["index"].is_number_integer())
        return violation(at + ".index");
      if (!s.contains("description") || !s["description"].is_string())
        return violation(at + ".description");
      if (!s.contains("code") || !s["code"].is_string())
        return violation(at + ".code");
      payload.plan.slices.push_back({s["index"].get<int>(),
                                     s["description"].get<std::string>(),
                                     s["code"].get<std::string>()});
    }
    return payload;
  }
  const char* field =
      kind == PayloadKind::TestFile ? "test_file" : "fixed_test";
  if (!j.is_object() || !j.contains(field) || !j[field].is_string())
    return violation(field);
  payload.source = j[field].get<std::string>();
  return payload;
}

}  // namespace

std::variant<Payload, FormatError> extract_payload(const std::string& raw,
                                                   PayloadKind kind) {
  std::variant<Payload, FormatError> last_error =
      FormatError{FormatError::Kind::NoJsonBlock,
                  "no JSON block found in response"};
  bool any_region = false;
  for (const auto& block : fenced_json_blocks(raw)) {
    any_region = true;
    auto result = decode(block, kind);
    if (std::holds_alternative<Payload>(result)) return result;
    last_error = result;
  }
  for (const auto& region : balanced_brace_regions(raw)) {
    any_region = true;
    auto result = decode(region, kind);
    if (std::holds_alternative<Payload>(result)) return result;
    last_error = result;
  }
  if (!any_region)
    return FormatError{FormatError::Kind::NoJsonBlock,
                       "no JSON block found in response"};
  return last_error;
}

std::variant<std::vector<TestCandidate>, IsolationError> isolate_tests(
    const std::string& test_file_source, const std::string& focal,
    int slice_index) {
  auto parsed = minilang::parse_program(test_file_source, "<test-file>");
  if (auto* err = std::get_if<minilang::ParseError>(&parsed))
    return IsolationError{"test file does not parse: " + err->message +
                          " (line " + std::to_string(err->line) + ")"};
  const minilang::Program& prog = std::get<minilang::Program>(parsed);

  std::vector<const minilang::FunctionDecl*> tests, helpers;
  for (const auto& f : prog.functions) {
    if (f.name.rfind("test_", 0) == 0 && f.params.empty())
      tests.push_back(&f);
    else
      helpers.push_back(&f);
  }
  if (tests.empty())
    return IsolationError{"no test_* function in generated test file"};

  std::string shared;
  for (const auto& g : prog.globals) shared += minilang::print_global(g) + "\n";
  for (const auto* h : helpers) shared += minilang::print_function(*h) + "\n";

  std::vector<TestCandidate> out;
  std::map<std::string, int> name_uses;
  for (const auto* t : tests) {
    TestCandidate c;
    c.focal = focal;
    c.slice_index = slice_index;
    c.test_name = t->name;
    c.fix_round = 0;
    int use = ++name_uses[t->name];
    c.id = focal + "/slice-" + std::to_string(slice_index) + "/" + t->name +
           (use > 1 ? "#" + std::to_string(use) : "") + "/r0";
    c.source = shared + minilang::print_function(*t);
    out.push_back(std::move(c));
  }
  return out;
}

const char* candidate_state_name(CandidateState s) {
  switch (s) {
    case CandidateState::Fresh: return "fresh";
    case CandidateState::RuleFixed: return "rule_fixed";
    case CandidateState::LlmFixed: return "llm_fixed";
    case CandidateState::Passed: return "passed";
    case CandidateState::Abandoned: return "abandoned";
  }
  return "?";
}

}  // namespace hits
