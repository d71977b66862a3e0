#include "hits/prompting.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hits {

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in)
    throw std::runtime_error("missing prompt asset: " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const char* kSystemText =
    "You are an expert MiniLang test engineer. MiniLang is a small "
    "imperative language: functions (`fn`), `let` bindings, `if`/`else`, "
    "`while`, `for (i in a .. b)`, `assert(expr)`, `print(expr)`, and the "
    "types int, bool, string and [int]. Unit tests are zero-parameter "
    "functions whose names start with `test_`. Follow the requested output "
    "format exactly.";

std::string quoted_source_line(const std::string& source, int line) {
  std::istringstream in(source);
  std::string text;
  for (int i = 1; std::getline(in, text); ++i)
    if (i == line) return text;
  return "";
}

}  // namespace

PromptAssets PromptAssets::load(const std::filesystem::path& dir) {
  PromptAssets a;
  a.decompose_oneshot = slurp(dir / "decompose_oneshot.md");
  a.scenario_example = slurp(dir / "scenario_example.md");
  a.environment_example = slurp(dir / "environment_example.md");
  a.test_skeleton = slurp(dir / "test_skeleton.md");
  a.fix_compile_examples = slurp(dir / "fix_compile_examples.md");
  a.fix_runtime_examples = slurp(dir / "fix_runtime_examples.md");
  a.registry.entries = {
      {"test-file structure", slurp(dir / "registry_test_structure.md")},
      {"accessing non-public elements",
       slurp(dir / "registry_globals_access.md")},
      {"nested-construct handling",
       slurp(dir / "registry_nested_constructs.md")},
      {"stub/double usage", slurp(dir / "registry_stubs.md")},
  };
  return a;
}

PromptBundle render_decompose(const PromptAssets& assets,
                              const FocalMethod& focal,
                              const ContextBundle& ctx) {
  PromptBundle bundle;
  bundle.family = PromptFamily::Decompose;
  bundle.expected_payload_kind = PayloadKind::SlicePlan;
  bundle.messages.push_back({Role::System, kSystemText});
  bundle.messages.push_back({Role::User, render_context(focal, ctx)});

  std::string task;
  task += "Decompose the focal method into slices. Work through the "
          "following steps and write your analysis in Markdown:\n\n";
  task += "1. Summarise what the focal method does in one short paragraph.\n";
  task += "2. Recite the meaning and usage of every non-local name the body "
          "uses: the globals listed above and each invoked function.\n";
  task += "3. Decompose the method body into slices, one slice per "
          "problem-solving step. Each slice is a contiguous run of "
          "statements. For every slice give a natural-language description "
          "and recite the corresponding original code segment verbatim, "
          "keeping the exact lines of the focal method.\n\n";
  task += "Here is a worked example of a decomposition:\n\n";
  task += assets.decompose_oneshot;
  task += "\n\nAfter the Markdown analysis, wrap the decomposition in a "
          "single JSON code block with exactly this shape:\n\n";
  task += "```json\n"
          "{\n"
          "  \"summary\": \"<one-line summary>\",\n"
          "  \"slices\": [\n"
          "    {\"index\": 1, \"description\": \"<step description>\", "
          "\"code\": \"<verbatim code segment>\"}\n"
          "  ]\n"
          "}\n"
          "```\n\n";
  task += "The `slices` array must list every slice in order; `description` "
          "and `code` are required on each entry. The recited `code` "
          "segments must jointly cover the whole method body without "
          "overlap.";
  bundle.messages.push_back({Role::User, std::move(task)});
  return bundle;
}

PromptBundle render_generate(const PromptAssets& assets,
                             const FocalMethod& focal,
                             const ContextBundle& ctx, const SlicePlan& plan,
                             int slice_index) {
  if (slice_index < 1 || slice_index > (int)plan.slices.size())
    throw std::out_of_range("slice index " + std::to_string(slice_index) +
                            " outside plan of " +
                            std::to_string(plan.slices.size()) + " slice(s)");
  PromptBundle bundle;
  bundle.family = PromptFamily::Generate;
  bundle.expected_payload_kind = PayloadKind::TestFile;
  bundle.messages.push_back({Role::System, kSystemText});
  bundle.messages.push_back({Role::User, render_context(focal, ctx)});

  std::string overview;
  overview += "The focal method has been decomposed into " +
              std::to_string(plan.slices.size()) + " slice(s):\n\n";
  for (const auto& s : plan.slices) {
    bool target = s.index == slice_index;
    overview += "### Slice " + std::to_string(s.index) +
                (target ? " (TARGET — generate tests for this slice)"
                        : " (already analysed, context only)") +
                "\n\n";
    overview += s.description + "\n\n";
    overview += "```mini\n" + s.recited_code;
    if (overview.back() != '\n') overview += '\n';
    overview += "```\n\n";
  }
  bundle.messages.push_back({Role::User, std::move(overview)});

  const Slice& target = plan.slices[slice_index - 1];
  std::string task;
  task += "Generate one MiniLang test file that covers every line and "
          "branch of slice " +
          std::to_string(target.index) + ". Work through this plan in "
          "Markdown:\n\n";
  task += "1. Recite the inputs of the target slice's code block and the "
          "functions it invokes.\n";
  task += "2. List all possible scenarios of this block; each scenario is "
          "one feasible input condition combination, described in natural "
          "language.\n";
  task += "3. For each scenario, infer how to set the overall execution "
          "environment (arguments and globals) so that execution reaches "
          "the slice and meets the scenario.\n";
  task += "4. Generate a test file whose test functions jointly cover all "
          "lines and branches of the target slice.\n\n";
  task += "Worked example for scenario analysis:\n\n";
  task += assets.scenario_example;
  task += "\n\nWorked example for inferring the execution environment:\n\n";
  task += assets.environment_example;
  task += "\n\nTips for writing executable MiniLang tests:\n\n";
  for (const auto& entry : assets.registry.entries) {
    task += "#### " + entry.category + "\n\n" + entry.body + "\n";
  }
  task += "\nSkeleton of a correct MiniLang test file:\n\n";
  task += assets.test_skeleton;
  task += "\n\nAfter the Markdown analysis, wrap the complete test file in "
          "a single JSON code block:\n\n";
  task += "```json\n{\n  \"test_file\": \"<complete MiniLang test file>\"\n}\n```\n";
  bundle.messages.push_back({Role::User, std::move(task)});
  return bundle;
}

PromptBundle render_fix(const PromptAssets& assets,
                        const std::string& context_prefix,
                        const TestCandidate& broken,
                        const minilang::ExecutionOutcome& outcome) {
  PromptBundle bundle;
  bundle.family = PromptFamily::Fix;
  bundle.expected_payload_kind = PayloadKind::FixedTest;
  bundle.messages.push_back({Role::System, kSystemText});
  bundle.messages.push_back({Role::User, context_prefix});

  bool compile = outcome.status == minilang::RunStatus::CompileError;
  std::string report;
  report += "The following test failed to ";
  report += compile ? "compile" : "execute";
  report += ":\n\n```mini\n" + broken.source;
  if (report.back() != '\n') report += '\n';
  report += "```\n\nError report:\n\n";
  report += outcome.message + "\n";
  if (outcome.failing_line) {
    report += "Failing line: " + std::to_string(*outcome.failing_line) + "\n";
    std::string quoted = quoted_source_line(broken.source,
                                            *outcome.failing_line);
    if (!quoted.empty()) report += "> " + quoted + "\n";
  }
  bundle.messages.push_back({Role::User, std::move(report)});

  std::string task;
  task += "Fix the broken test. Work through this plan in Markdown:\n\n";
  task += "1. Summarise the cause of the error.\n";
  task += "2. Describe how to alleviate the cause.\n";
  task += "3. Generate the fixed version of the test.\n\n";
  task += "Common causes of failure, with fixes:\n\n";
  if (compile) {
    task += assets.fix_compile_examples;
    task += "\n\n";
    task += assets.fix_runtime_examples;
  } else {
    task += assets.fix_runtime_examples;
    task += "\n\n";
    task += assets.fix_compile_examples;
  }
  task += "\n\nAfter the Markdown analysis, wrap the fixed test file in a "
          "single JSON code block:\n\n";
  task += "```json\n{\n  \"fixed_test\": \"<complete fixed MiniLang test file>\"\n}\n```\n";
  bundle.messages.push_back({Role::User, std::move(task)});
  return bundle;
}

}  // namespace hits
