#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hits/extraction.hpp"
#include "hits/focal.hpp"
#include "hits/minilang/interp.hpp"
#include "hits/slicing.hpp"

namespace hits {

enum class PromptFamily { Decompose, Generate, Fix };

enum class Role { System, User };

struct Message {
  Role role;
  std::string text;
};

struct PromptBundle {
  PromptFamily family;
  std::vector<Message> messages;
  PayloadKind expected_payload_kind;

  size_t total_chars() const {
    size_t n = 0;
    for (const auto& m : messages) n += m.text.size();
    return n;
  }
};

struct RegistryEntry {
  std::string category;
  std::string body;  // description plus worked example
};

struct InstructionRegistry {
  std::vector<RegistryEntry> entries;  // exactly the four fixed categories
};

/// Static template assets loaded once at startup from assets/prompts/.
/// A missing file raises std::runtime_error naming it.
struct PromptAssets {
  std::string decompose_oneshot;
  std::string scenario_example;
  std::string environment_example;
  std::string test_skeleton;
  std::string fix_compile_examples;
  std::string fix_runtime_examples;
  InstructionRegistry registry;

  static PromptAssets load(const std::filesystem::path& dir);
};

PromptBundle render_decompose(const PromptAssets& assets,
                              const FocalMethod& focal,
                              const ContextBundle& ctx);

PromptBundle render_generate(const PromptAssets& assets,
                             const FocalMethod& focal,
                             const ContextBundle& ctx, const SlicePlan& plan,
                             int slice_index);

/// `context_prefix` is the same rendered context block the other two
/// families carry; the pipeline passes it through.
PromptBundle render_fix(const PromptAssets& assets,
                        const std::string& context_prefix,
                        const TestCandidate& broken,
                        const minilang::ExecutionOutcome& outcome);

}  // namespace hits
