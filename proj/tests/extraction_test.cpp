#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hits/extraction.hpp"
#include "hits/minilang/interp.hpp"
#include "hits/minilang/parser.hpp"
#include "support/random_program.hpp"

using namespace hits;

namespace {

Payload must_extract(const std::string& raw, PayloadKind kind) {
  auto r = extract_payload(raw, kind);
  if (auto* e = std::get_if<FormatError>(&r))
    FAIL("extraction failed: ", e->detail);
  return std::move(std::get<Payload>(r));
}

FormatError::Kind must_fail(const std::string& raw, PayloadKind kind) {
  auto r = extract_payload(raw, kind);
  REQUIRE(std::holds_alternative<FormatError>(r));
  return std::get<FormatError>(r).kind;
}

}  // namespace

TEST_CASE("extract: fenced json block with surrounding prose") {
  std::string raw =
      "Some analysis first.\n\n```json\n{\"test_file\": \"fn test_a() {\\n}\"}\n```\nTrailing.";
  auto p = must_extract(raw, PayloadKind::TestFile);
  CHECK(p.kind == PayloadKind::TestFile);
  CHECK(p.source == "fn test_a() {\n}");
}

TEST_CASE("extract: untagged fence and bare balanced braces also work") {
  auto p1 = must_extract("```\n{\"test_file\": \"x\"}\n```", PayloadKind::TestFile);
  CHECK(p1.source == "x");
  auto p2 = must_extract("noise {\"test_file\": \"y\"} noise", PayloadKind::TestFile);
  CHECK(p2.source == "y");
}

TEST_CASE("extract: json fence wins over earlier junk braces") {
  std::string raw =
      "{not json at all}\n```json\n{\"fixed_test\": \"ok\"}\n```";
  auto p = must_extract(raw, PayloadKind::FixedTest);
  CHECK(p.source == "ok");
}

TEST_CASE("extract: slice plan schema decodes all fields") {
  std::string raw =
      "```json\n"
      "{\"summary\": \"s\", \"slices\": ["
      "{\"index\": 1, \"description\": \"d1\", \"code\": \"c1\"},"
      "{\"index\": 2, \"description\": \"d2\", \"code\": \"c2\"}]}\n"
      "```";
  auto p = must_extract(raw, PayloadKind::SlicePlan);
  CHECK(p.plan.summary == "s");
  REQUIRE(p.plan.slices.size() == 2);
  CHECK(p.plan.slices[1].index == 2);
  CHECK(p.plan.slices[1].code == "c2");
}

TEST_CASE("extract: error classification") {
  CHECK(must_fail("no payload here at all", PayloadKind::TestFile) ==
        FormatError::Kind::NoJsonBlock);
  CHECK(must_fail("```json\n{\"test_file\": \n```", PayloadKind::TestFile) ==
        FormatError::Kind::ParseFailure);
  CHECK(must_fail("```json\n{\"wrong_key\": \"x\"}\n```", PayloadKind::TestFile) ==
        FormatError::Kind::SchemaViolation);
  CHECK(must_fail("```json\n{\"test_file\": 42}\n```", PayloadKind::TestFile) ==
        FormatError::Kind::SchemaViolation);
  // schema violation names the offending slice field
  auto r = extract_payload(
      "```json\n{\"summary\": \"s\", \"slices\": [{\"index\": 1, \"description\": \"d\"}]}\n```",
      PayloadKind::SlicePlan);
  REQUIRE(std::holds_alternative<FormatError>(r));
  CHECK(std::get<FormatError>(r).detail.find("slices[0]") != std::string::npos);
}

TEST_CASE("extract: total over adversarial bytes") {
  // None of these may throw; they must all classify as some FormatError
  // or succeed.
  const std::string cases[] = {
      "",
      "```json",
      "```json\n```",
      "{{{{{{{",
      "}}}}}}}",
      std::string(1, '\0') + "{\"test_file\": \"x\"}",
      "```json\n{\"test_file\": \"\\ud800\"}\n```",  // lone surrogate
      std::string(100000, '{'),
      "```json\n[1, 2, 3]\n```",
  };
  for (const auto& raw : cases)
    CHECK_NOTHROW((void)extract_payload(raw, PayloadKind::TestFile));
}

TEST_CASE("isolate: one candidate per test, helpers and globals shared") {
  std::string file =
      "let base: int = 10;\n"
      "fn helper(x: int) -> int {\n    return x + base;\n}\n"
      "fn test_a() {\n    assert(helper(1) == 11);\n}\n"
      "fn test_b() {\n    assert(helper(2) == 12);\n}\n";
  auto r = isolate_tests(file, "f.mini::focal", 2);
  REQUIRE(std::holds_alternative<std::vector<TestCandidate>>(r));
  auto cands = std::get<std::vector<TestCandidate>>(r);
  REQUIRE(cands.size() == 2);
  CHECK(cands[0].test_name == "test_a");
  CHECK(cands[1].test_name == "test_b");
  CHECK(cands[0].id == "f.mini::focal/slice-2/test_a/r0");
  for (const auto& c : cands) {
    CHECK(c.state == CandidateState::Fresh);
    CHECK(c.source.find("let base") != std::string::npos);
    CHECK(c.source.find("fn helper") != std::string::npos);
  }
  // Each candidate holds exactly one test function.
  CHECK(cands[0].source.find("test_b") == std::string::npos);
  CHECK(cands[1].source.find("test_a") == std::string::npos);
}

TEST_CASE("isolate: parameterized or non-test functions are not tests") {
  std::string file =
      "fn test_with_arg(x: int) {\n    assert(x == x);\n}\n"
      "fn helper() {\n    return;\n}\n";
  auto r = isolate_tests(file, "f", 1);
  REQUIRE(std::holds_alternative<IsolationError>(r));
}

TEST_CASE("isolate: unparseable input is an isolation error") {
  auto r = isolate_tests("fn test_a() {\n    assert(true);\n", "f", 1);
  REQUIRE(std::holds_alternative<IsolationError>(r));
  CHECK(std::get<IsolationError>(r).message.find("parse") != std::string::npos);
}

TEST_CASE("isolate: duplicate test names get distinct candidate ids") {
  // The parser rejects duplicate function names only at check time, so
  // isolation must still hand out unique ids.
  std::string file =
      "fn test_a() {\n    assert(true);\n}\n"
      "fn test_a_more() {\n    assert(true);\n}\n";
  auto r = isolate_tests(file, "f", 1);
  REQUIRE(std::holds_alternative<std::vector<TestCandidate>>(r));
  auto cands = std::get<std::vector<TestCandidate>>(r);
  CHECK(cands[0].id != cands[1].id);
}

TEST_CASE("isolation equivalence on 200 random multi-test files") {
  // Acceptance criterion: union coverage of the isolated candidates must
  // equal the coverage of running the original multi-test file, because
  // globals reset before every test function.
  using namespace hits::minilang;
  testgen::Rng rng(20240819);
  int agreements = 0;
  for (int i = 0; i < 200; ++i) {
    auto prog = testgen::random_program(rng, rng.next(2, 4));
    auto file = testgen::random_test_file(rng, prog, rng.next(2, 5));
    auto parsed = parse_program(prog.source, "<p>");
    REQUIRE(std::holds_alternative<Program>(parsed));
    const auto& program = std::get<Program>(parsed);

    auto whole = run_test(program, file, {});
    REQUIRE(whole.status == RunStatus::Passed);

    auto isolated = isolate_tests(file, "f", 1);
    REQUIRE(std::holds_alternative<std::vector<TestCandidate>>(isolated));
    RawCoverage merged;
    for (const auto& c : std::get<std::vector<TestCandidate>>(isolated)) {
      auto one = run_test(program, c.source, {});
      REQUIRE(one.status == RunStatus::Passed);
      merged.merge(one.coverage);
    }
    bool lines_equal = merged.covered_lines == whole.coverage.covered_lines;
    bool branches_equal = merged.branch_hits == whole.coverage.branch_hits;
    CHECK(lines_equal);
    CHECK(branches_equal);
    if (lines_equal && branches_equal) ++agreements;
  }
  CHECK(agreements == 200);
}

TEST_CASE("candidate state names") {
  CHECK(std::string(candidate_state_name(CandidateState::Fresh)) == "fresh");
  CHECK(std::string(candidate_state_name(CandidateState::RuleFixed)) == "rule_fixed");
  CHECK(std::string(candidate_state_name(CandidateState::LlmFixed)) == "llm_fixed");
  CHECK(std::string(candidate_state_name(CandidateState::Passed)) == "passed");
  CHECK(std::string(candidate_state_name(CandidateState::Abandoned)) == "abandoned");
}
