#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hits/minilang/interp.hpp"
#include "hits/minilang/parser.hpp"
#include "support/random_program.hpp"

using namespace hits::minilang;

namespace {

Program parse_or_fail(const std::string& src) {
  auto r = parse_program(src, "<test>");
  if (auto* e = std::get_if<ParseError>(&r))
    FAIL("parse error line ", e->line, ": ", e->message);
  return std::move(std::get<Program>(r));
}

const char* kClampSrc =
    "fn clamp(v: int, lo: int, hi: int) -> int {\n"  // 1
    "    if (v < lo) {\n"                            // 2
    "        return lo;\n"                           // 3
    "    }\n"                                        // 4
    "    if (v > hi) {\n"                            // 5
    "        return hi;\n"                           // 6
    "    }\n"                                        // 7
    "    return v;\n"                                // 8
    "}\n";                                           // 9

}  // namespace

TEST_CASE("run_test: passing, failing and compile-error outcomes") {
  auto prog = parse_or_fail(kClampSrc);

  auto pass = run_test(prog, "fn test_mid() {\n    assert(clamp(5, 0, 9) == 5);\n}\n", {});
  CHECK(pass.status == RunStatus::Passed);

  auto fail = run_test(prog, "fn test_bad() {\n    assert(clamp(5, 0, 9) == 7);\n}\n", {});
  CHECK(fail.status == RunStatus::RuntimeError);
  CHECK(fail.message == "assertion failed (in test_bad)");
  REQUIRE(fail.failing_line.has_value());
  CHECK(*fail.failing_line == 2);

  auto parse_bad = run_test(prog, "fn test_x() {\n    assert(clamp(1, 2, 3) == 2;\n}\n", {});
  CHECK(parse_bad.status == RunStatus::CompileError);
  CHECK(parse_bad.message.rfind("parse error: ", 0) == 0);

  auto check_bad = run_test(prog, "fn test_x() {\n    assert(clamp(1) == 2);\n}\n", {});
  CHECK(check_bad.status == RunStatus::CompileError);
  CHECK(check_bad.message.rfind("check error: ", 0) == 0);
}

TEST_CASE("run_test: runtime fault classes") {
  auto prog = parse_or_fail(
      "fn div(a: int, b: int) -> int {\n    return a / b;\n}\n"
      "fn pick(xs: [int], i: int) -> int {\n    return xs[i];\n}\n"
      "fn spin() -> int {\n    let i = 0;\n    while (i >= 0) {\n        i = i + 1;\n    }\n    return i;\n}\n"
      "fn rec(n: int) -> int {\n    return rec(n + 1);\n}\n"
      "fn hole(a: int) -> int {\n    if (a > 0) {\n        return 1;\n    }\n}\n");

  auto by_zero = run_test(prog, "fn test_d() {\n    let r = div(1, 0);\n}\n", {});
  CHECK(by_zero.status == RunStatus::RuntimeError);
  CHECK(by_zero.message.find("division") != std::string::npos);

  auto oob = run_test(prog, "fn test_i() {\n    let r = pick([1, 2], 5);\n}\n", {});
  CHECK(oob.status == RunStatus::RuntimeError);
  CHECK(oob.message.find("index") != std::string::npos);

  ExecutionLimits tight;
  tight.max_steps = 1000;
  auto steps = run_test(prog, "fn test_s() {\n    let r = spin();\n}\n", tight);
  CHECK(steps.status == RunStatus::RuntimeError);
  CHECK(steps.message.find("step limit") != std::string::npos);

  auto deep = run_test(prog, "fn test_r() {\n    let r = rec(0);\n}\n", {});
  CHECK(deep.status == RunStatus::RuntimeError);
  CHECK(deep.message.find("call depth") != std::string::npos);

  auto missing = run_test(prog, "fn test_m() {\n    let r = hole(-1);\n}\n", {});
  CHECK(missing.status == RunStatus::RuntimeError);
  CHECK(missing.message.find("return") != std::string::npos);
}

TEST_CASE("run_test: tests run in declaration order, stop at first failure") {
  auto prog = parse_or_fail(kClampSrc);
  auto out = run_test(prog,
                      "fn test_a() {\n    print(\"a\");\n}\n"
                      "fn test_b() {\n    assert(false);\n}\n"
                      "fn test_c() {\n    print(\"c\");\n}\n",
                      {});
  CHECK(out.status == RunStatus::RuntimeError);
  CHECK(out.message == "assertion failed (in test_b)");
  CHECK(out.printed == "a\n");  // test_c never ran
}

TEST_CASE("run_test: globals re-initialized before every test function") {
  auto prog = parse_or_fail(
      "let counter: int = 0;\n"
      "fn bump() -> int {\n    counter = counter + 1;\n    return counter;\n}\n");
  auto out = run_test(prog,
                      "fn test_one() {\n    assert(bump() == 1);\n}\n"
                      "fn test_two() {\n    assert(bump() == 1);\n}\n",
                      {});
  CHECK(out.status == RunStatus::Passed);
}

TEST_CASE("coverage: only program-under-test lines counted, branch arms registered") {
  auto prog = parse_or_fail(kClampSrc);
  auto out = run_test(prog, "fn test_mid() {\n    assert(clamp(5, 0, 9) == 5);\n}\n", {});
  REQUIRE(out.status == RunStatus::Passed);
  // clamp lines 2 (if), 5 (if), 8 (return) execute; test file lines don't count.
  CHECK(out.coverage.covered_lines ==
        std::set<std::pair<std::string, int>>{
            {"clamp", 2}, {"clamp", 5}, {"clamp", 8}});
  // Both arms registered at each evaluated site, false taken.
  CHECK(out.coverage.branch_hits.at({"clamp", 2, false}) == 1);
  CHECK(out.coverage.branch_hits.at({"clamp", 2, true}) == 0);
  CHECK(out.coverage.branch_hits.at({"clamp", 5, false}) == 1);
  CHECK(out.coverage.branch_hits.at({"clamp", 5, true}) == 0);
}

TEST_CASE("coverage: for-loop implicit condition is a branch site") {
  auto prog = parse_or_fail(
      "fn total(n: int) -> int {\n"   // 1
      "    let s = 0;\n"              // 2
      "    for (i in 0 .. n) {\n"     // 3
      "        s = s + i;\n"          // 4
      "    }\n"                       // 5
      "    return s;\n"               // 6
      "}\n");
  auto out = run_test(prog, "fn test_t() {\n    assert(total(3) == 3);\n}\n", {});
  REQUIRE(out.status == RunStatus::Passed);
  CHECK(out.coverage.branch_hits.at({"total", 3, true}) == 3);
  CHECK(out.coverage.branch_hits.at({"total", 3, false}) == 1);
}

TEST_CASE("determinism: repeated runs give identical outcomes") {
  testgen::Rng rng(99);
  auto prog = testgen::random_program(rng, 5);
  auto test = testgen::random_test_file(rng, prog, 4);
  auto parsed = parse_or_fail(prog.source);
  auto first = run_test(parsed, test, {});
  for (int i = 0; i < 5; ++i) {
    auto again = run_test(parsed, test, {});
    CHECK(again.status == first.status);
    CHECK(again.message == first.message);
    CHECK(again.printed == first.printed);
    CHECK(again.coverage.covered_lines == first.coverage.covered_lines);
    CHECK(again.coverage.branch_hits == first.coverage.branch_hits);
  }
}

TEST_CASE("coverage oracle: trace agrees on 200 random (program, test) pairs") {
  // Acceptance criterion: RawCoverage must equal the aggregation of the
  // independent per-event trace log.
  testgen::Rng rng(20240818);
  int agreements = 0;
  for (int i = 0; i < 200; ++i) {
    auto prog = testgen::random_program(rng, rng.next(2, 5));
    auto test = testgen::random_test_file(rng, prog, rng.next(1, 3));
    auto parsed = parse_or_fail(prog.source);

    std::vector<TraceEvent> trace;
    auto out = run_test(parsed, test, {}, &trace);
    REQUIRE(out.status == RunStatus::Passed);

    std::set<std::pair<std::string, int>> traced_lines;
    std::map<std::pair<std::string, int>, long long> traced_branch_totals;
    for (const auto& ev : trace) {
      if (ev.kind == TraceEvent::Kind::Statement)
        traced_lines.insert({ev.function, ev.line});
      else
        ++traced_branch_totals[{ev.function, ev.line}];
    }

    bool lines_equal = out.coverage.covered_lines == traced_lines;
    CHECK(lines_equal);

    // true-hits + false-hits at each site == number of condition
    // evaluations the trace saw there.
    std::map<std::pair<std::string, int>, long long> summed;
    for (const auto& [key, hits] : out.coverage.branch_hits)
      summed[{std::get<0>(key), std::get<1>(key)}] += hits;
    bool branches_equal = summed == traced_branch_totals;
    CHECK(branches_equal);

    if (lines_equal && branches_equal) ++agreements;
  }
  CHECK(agreements == 200);
}

TEST_CASE("coverage merge is a set union / counter sum") {
  auto prog = parse_or_fail(kClampSrc);
  auto low = run_test(prog, "fn test_l() {\n    assert(clamp(-1, 0, 9) == 0);\n}\n", {});
  auto mid = run_test(prog, "fn test_m() {\n    assert(clamp(5, 0, 9) == 5);\n}\n", {});
  RawCoverage merged = low.coverage;
  merged.merge(mid.coverage);
  CHECK(merged.covered_lines.size() >= low.coverage.covered_lines.size());
  CHECK(merged.covered_lines.size() >= mid.coverage.covered_lines.size());
  CHECK(merged.branch_hits.at({"clamp", 2, true}) == 1);
  CHECK(merged.branch_hits.at({"clamp", 2, false}) == 1);
  // Monotonicity: adding a run never removes covered lines.
  for (const auto& l : low.coverage.covered_lines)
    CHECK(merged.covered_lines.count(l) == 1);
}

TEST_CASE("classify_outcomes: fractions over non-passing outcomes") {
  ExecutionOutcome pass;
  ExecutionOutcome comp;
  comp.status = RunStatus::CompileError;
  ExecutionOutcome runt;
  runt.status = RunStatus::RuntimeError;

  auto d = classify_outcomes({pass, comp, comp, runt});
  CHECK(d.passed_count == 1);
  CHECK(d.compile_count == 2);
  CHECK(d.runtime_count == 1);
  CHECK(d.compile_fraction == doctest::Approx(2.0 / 3.0));
  CHECK(d.runtime_fraction == doctest::Approx(1.0 / 3.0));

  auto none = classify_outcomes({pass, pass});
  CHECK(none.compile_fraction == 0.0);
  CHECK(none.runtime_fraction == 0.0);
}
