#pragma once

#include <filesystem>
#include <string>

#include "hits/gateway.hpp"
#include "hits/report.hpp"

namespace hits {

enum class BackendMode { Live, Record, Replay };

struct RunConfig {
  std::filesystem::path project_root;
  int threshold = 10;
  BackendMode backend = BackendMode::Replay;
  int max_fix_rounds = 10;
  int tests_per_slice = 1;  // one generated test file per slice
  int context_depth = 1;
  int target_decisions_per_slice = 3;
  minilang::ExecutionLimits limits;
  std::filesystem::path out_dir = "out";
  std::filesystem::path transcripts;  // store file (record) or dir (replay)
  std::filesystem::path assets_dir = "assets/prompts";
  std::string model = "gpt-3.5-turbo";
  int max_output_tokens = 2048;
  int workers = 1;
  bool stable_output = false;
  bool trace = false;
};

/// Parse a flat `key = value` config file into `config`; unknown keys are
/// an error. CLI flags override afterwards.
void apply_config_file(const std::filesystem::path& file, RunConfig& config);

struct PipelineResult {
  CoverageReport report;
  bool any_errored = false;
  std::vector<std::string> notes;  // skipped files, per-method errors
};

struct FatalError {
  std::string message;
};

/// scan -> decompose -> per-slice generate -> isolate -> repair -> execute
/// -> aggregate. Per-method failures are recorded, never fatal. Artifacts
/// land under config.out_dir.
std::variant<PipelineResult, FatalError> run_pipeline(const RunConfig& config,
                                                      Backend& backend,
                                                      const PromptAssets& assets);

}  // namespace hits
