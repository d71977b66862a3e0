#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hits/prompting.hpp"
#include "hits/slicing.hpp"

using namespace hits;
namespace fs = std::filesystem;

namespace {

const std::string kRoot = HITS_REPO_ROOT;

PromptAssets load_assets() { return PromptAssets::load(kRoot + "/assets/prompts"); }

/// Flatten a bundle into a reviewable text form used by the goldens.
std::string flatten(const PromptBundle& bundle) {
  std::string out;
  for (const auto& m : bundle.messages) {
    out += "=== ";
    out += m.role == Role::System ? "system" : "user";
    out += " ===\n";
    out += m.text;
    if (out.back() != '\n') out += '\n';
  }
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(bool(in), "missing golden file: ", p.string(),
                  " (set REGEN_GOLDEN=1 to create it)");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Compare against a committed golden; REGEN_GOLDEN=1 rewrites it instead.
void check_golden(const std::string& name, const std::string& actual) {
  fs::path path = fs::path(kRoot) / "tests" / "golden" / "prompts" / name;
  if (std::getenv("REGEN_GOLDEN")) {
    fs::create_directories(path.parent_path());
    std::ofstream(path, std::ios::binary) << actual;
    return;
  }
  std::string expected = slurp(path);
  bool equal = actual == expected;
  CHECK_MESSAGE(equal, "rendered prompt differs from golden ", name);
}

struct Fixture {
  Project project;
  const FocalMethod* score_band;
  const minilang::FunctionDecl* score_band_fn;
  ContextBundle ctx;
  std::vector<FocalMethod> focal;

  Fixture() {
    auto loaded = load_project(kRoot + "/fixtures/proj-a");
    REQUIRE(std::holds_alternative<Project>(loaded));
    project = std::move(std::get<Project>(loaded));
    focal = select_focal_methods(project, 10);
    REQUIRE(focal.size() == 2);
    score_band = &focal[0];
    REQUIRE(score_band->function_name == "score_band");
    score_band_fn = project.find_function("score_band");
    REQUIRE(score_band_fn != nullptr);
    ctx = build_context(project, *score_band);
  }
};

}  // namespace

TEST_CASE("assets: all ten template files load; a missing one is named") {
  auto assets = load_assets();
  CHECK_FALSE(assets.decompose_oneshot.empty());
  CHECK_FALSE(assets.scenario_example.empty());
  CHECK_FALSE(assets.environment_example.empty());
  CHECK_FALSE(assets.test_skeleton.empty());
  CHECK_FALSE(assets.fix_compile_examples.empty());
  CHECK_FALSE(assets.fix_runtime_examples.empty());

  fs::path empty_dir = fs::temp_directory_path() / "hits_no_assets";
  fs::create_directories(empty_dir);
  CHECK_THROWS_WITH_AS(PromptAssets::load(empty_dir),
                       doctest::Contains("decompose_oneshot.md"),
                       std::runtime_error);
  fs::remove_all(empty_dir);
}

TEST_CASE("assets: instruction registry has exactly the four categories") {
  auto assets = load_assets();
  REQUIRE(assets.registry.entries.size() == 4);
  CHECK(assets.registry.entries[0].category == "test-file structure");
  CHECK(assets.registry.entries[1].category == "accessing non-public elements");
  CHECK(assets.registry.entries[2].category == "nested-construct handling");
  CHECK(assets.registry.entries[3].category == "stub/double usage");
  for (const auto& e : assets.registry.entries) CHECK_FALSE(e.body.empty());
}

TEST_CASE("render: payload kind and message roles per family") {
  Fixture fx;
  auto assets = load_assets();

  auto dec = render_decompose(assets, *fx.score_band, fx.ctx);
  CHECK(dec.family == PromptFamily::Decompose);
  CHECK(dec.expected_payload_kind == PayloadKind::SlicePlan);
  REQUIRE(dec.messages.size() == 3);
  CHECK(dec.messages[0].role == Role::System);

  auto plan = fallback_slice(*fx.score_band, *fx.score_band_fn, 4);
  auto gen = render_generate(assets, *fx.score_band, fx.ctx, plan, 1);
  CHECK(gen.family == PromptFamily::Generate);
  CHECK(gen.expected_payload_kind == PayloadKind::TestFile);
  REQUIRE(gen.messages.size() == 4);

  TestCandidate broken;
  broken.id = "x";
  broken.source = "fn test_a() {\n    assert(false);\n}\n";
  minilang::ExecutionOutcome outcome;
  outcome.status = minilang::RunStatus::RuntimeError;
  outcome.message = "assertion failed (in test_a)";
  outcome.failing_line = 2;
  auto fix = render_fix(assets, "CTX", broken, outcome);
  CHECK(fix.family == PromptFamily::Fix);
  CHECK(fix.expected_payload_kind == PayloadKind::FixedTest);
  REQUIRE(fix.messages.size() == 4);
  CHECK(fix.total_chars() > 0);
}

TEST_CASE("render: context block is shared verbatim across families") {
  Fixture fx;
  auto assets = load_assets();
  std::string context = render_context(*fx.score_band, fx.ctx);

  auto dec = render_decompose(assets, *fx.score_band, fx.ctx);
  CHECK(dec.messages[1].text == context);
  auto plan = fallback_slice(*fx.score_band, *fx.score_band_fn, 4);
  auto gen = render_generate(assets, *fx.score_band, fx.ctx, plan, 1);
  CHECK(gen.messages[1].text == context);

  TestCandidate broken;
  broken.source = "fn test_a() {\n}\n";
  minilang::ExecutionOutcome outcome;
  outcome.status = minilang::RunStatus::CompileError;
  outcome.message = "check error: x";
  auto fix = render_fix(assets, context, broken, outcome);
  CHECK(fix.messages[1].text == context);
}

TEST_CASE("render_generate: slice index must be inside the plan") {
  Fixture fx;
  auto assets = load_assets();
  auto plan = fallback_slice(*fx.score_band, *fx.score_band_fn, 4);
  REQUIRE(plan.slices.size() >= 2);
  CHECK_THROWS_AS(render_generate(assets, *fx.score_band, fx.ctx, plan, 0),
                  std::out_of_range);
  CHECK_THROWS_AS(render_generate(assets, *fx.score_band, fx.ctx, plan,
                                  (int)plan.slices.size() + 1),
                  std::out_of_range);
}

TEST_CASE("render_generate: exactly one slice is marked as the target") {
  Fixture fx;
  auto assets = load_assets();
  auto plan = fallback_slice(*fx.score_band, *fx.score_band_fn, 4);
  for (int i = 1; i <= (int)plan.slices.size(); ++i) {
    auto gen = render_generate(assets, *fx.score_band, fx.ctx, plan, i);
    const std::string& overview = gen.messages[2].text;
    size_t targets = 0;
    for (size_t at = overview.find("(TARGET"); at != std::string::npos;
         at = overview.find("(TARGET", at + 1))
      ++targets;
    CHECK(targets == 1);
    CHECK(overview.find("### Slice " + std::to_string(i) + " (TARGET") !=
          std::string::npos);
  }
}

TEST_CASE("render_fix: failing line is quoted from the broken source") {
  auto assets = load_assets();
  TestCandidate broken;
  broken.source =
      "fn test_a() {\n"
      "    let x = 1;\n"
      "    assert(x == 2);\n"
      "}\n";
  minilang::ExecutionOutcome outcome;
  outcome.status = minilang::RunStatus::RuntimeError;
  outcome.message = "assertion failed (in test_a)";
  outcome.failing_line = 3;
  auto fix = render_fix(assets, "CTX", broken, outcome);
  const std::string& report = fix.messages[2].text;
  CHECK(report.find("Failing line: 3") != std::string::npos);
  CHECK(report.find(">     assert(x == 2);") != std::string::npos);
  CHECK(report.find("assertion failed (in test_a)") != std::string::npos);

  // Compile errors lead with the compile-fix examples, runtime errors with
  // the runtime ones.
  CHECK(fix.messages[3].text.find(assets.fix_runtime_examples) <
        fix.messages[3].text.find(assets.fix_compile_examples));
  minilang::ExecutionOutcome comp;
  comp.status = minilang::RunStatus::CompileError;
  comp.message = "parse error: x";
  auto fix2 = render_fix(assets, "CTX", broken, comp);
  CHECK(fix2.messages[3].text.find(assets.fix_compile_examples) <
        fix2.messages[3].text.find(assets.fix_runtime_examples));
}

TEST_CASE("golden rendered prompts for the fixture focal method") {
  Fixture fx;
  auto assets = load_assets();

  check_golden("score_band.decompose.txt",
               flatten(render_decompose(assets, *fx.score_band, fx.ctx)));

  auto plan = fallback_slice(*fx.score_band, *fx.score_band_fn, 4);
  check_golden("score_band.generate-1.txt",
               flatten(render_generate(assets, *fx.score_band, fx.ctx, plan, 1)));

  TestCandidate broken;
  broken.id = "main.mini::score_band/slice-1/test_x/r0";
  broken.source = "fn test_x() {\n    assert(score_band(0, 0, true) == 4);\n}\n";
  minilang::ExecutionOutcome outcome;
  outcome.status = minilang::RunStatus::RuntimeError;
  outcome.message = "assertion failed (in test_x)";
  outcome.failing_line = 2;
  check_golden("score_band.fix.txt",
               flatten(render_fix(assets, render_context(*fx.score_band, fx.ctx),
                                  broken, outcome)));
}
