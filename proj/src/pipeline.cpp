#include "hits/pipeline.hpp"

#include <cctype>
#include <fstream>
#include <future>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hits/minilang/check.hpp"
#include "hits/minilang/parser.hpp"
#include "hits/minilang/printer.hpp"
#include "hits/repair.hpp"
#include "hits/slicing.hpp"

namespace hits {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum((unsigned char)c) || c == '-' || c == '.' || c == '_')
      out.push_back(c);
    else
      out.push_back('_');
  }
  return out;
}

void write_file(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << content;
}

std::string plan_to_json(const SlicePlan& plan) {
  json j{{"focal", plan.focal},
         {"origin", plan.origin == SliceOrigin::Llm ? "llm" : "fallback"}};
  j["slices"] = json::array();
  for (const auto& s : plan.slices)
    j["slices"].push_back({{"index", s.index},
                           {"description", s.description},
                           {"code", s.recited_code},
                           {"first_line", s.first_line},
                           {"last_line", s.last_line}});
  return j.dump(2) + "\n";
}

struct CandidateRecord {
  TestCandidate candidate;
  minilang::ExecutionOutcome final_outcome;
  std::vector<FixAttempt> attempts;
  std::string abandon_reason;
};

struct FocalWork {
  FocalReport report;
  std::string context_md;
  std::string slices_json;
  std::vector<CandidateRecord> records;
  std::vector<std::string> notes;
};

const char* status_name(minilang::RunStatus s) {
  switch (s) {
    case minilang::RunStatus::Passed: return "passed";
    case minilang::RunStatus::CompileError: return "compile_error";
    case minilang::RunStatus::RuntimeError: return "runtime_error";
  }
  return "?";
}

FocalWork process_focal(const RunConfig& config, const Project& project,
                        const minilang::Program& merged_program,
                        const FocalMethod& focal,
                        const minilang::FunctionDecl& focal_fn,
                        Backend& backend, const PromptAssets& assets) {
  FocalWork work;
  work.report.qualified_name = focal.qualified_name;
  work.report.line_total = (int)minilang::statement_lines(focal_fn).size();
  work.report.branch_total =
      2 * (int)minilang::branch_sites(focal_fn).size();

  ContextBundle ctx = build_context(project, focal, config.context_depth);
  std::string context_prefix = render_context(focal, ctx);
  work.context_md = context_prefix;

  // Decomposition: LLM first, deterministic fallback when every retry
  // violates the format or the recitation contract.
  SlicePlan plan;
  {
    auto bundle = render_decompose(assets, focal, ctx);
    auto validator = [&](const std::string& raw) {
      auto payload = extract_payload(raw, PayloadKind::SlicePlan);
      if (!std::holds_alternative<Payload>(payload)) return false;
      auto validated = validate_slice_plan(
          std::get<Payload>(payload).plan, focal, focal_fn);
      return std::holds_alternative<SlicePlan>(validated);
    };
    auto result = complete_with_escalation(backend, bundle, validator,
                                           config.max_output_tokens);
    if (auto* err = std::get_if<GatewayError>(&result)) {
      if (err->kind == GatewayError::Kind::FormatExhausted) {
        plan = fallback_slice(focal, focal_fn,
                              config.target_decisions_per_slice);
        work.notes.push_back(focal.qualified_name +
                             ": decomposition fell back after " +
                             std::to_string(err->attempts.size()) +
                             " rejected responses");
      } else {
        work.report.errored = true;
        work.report.error_message = err->message;
        return work;
      }
    } else {
      auto payload = std::get<Payload>(extract_payload(
          std::get<EscalationResult>(result).text, PayloadKind::SlicePlan));
      plan = std::get<SlicePlan>(
          validate_slice_plan(payload.plan, focal, focal_fn));
    }
  }
  work.slices_json = plan_to_json(plan);

  // One generated test file per slice, isolated into candidates.
  std::vector<TestCandidate> candidates;
  for (const auto& slice : plan.slices) {
    auto bundle = render_generate(assets, focal, ctx, plan, slice.index);
    auto validator = [](const std::string& raw) {
      return std::holds_alternative<Payload>(
          extract_payload(raw, PayloadKind::TestFile));
    };
    auto result = complete_with_escalation(backend, bundle, validator,
                                           config.max_output_tokens);
    if (auto* err = std::get_if<GatewayError>(&result)) {
      if (err->kind == GatewayError::Kind::FormatExhausted) {
        work.notes.push_back(focal.qualified_name + " slice " +
                             std::to_string(slice.index) +
                             ": generation format exhausted, no tests");
        continue;
      }
      work.report.errored = true;
      work.report.error_message = err->message;
      return work;
    }
    auto payload = std::get<Payload>(extract_payload(
        std::get<EscalationResult>(result).text, PayloadKind::TestFile));
    auto isolated =
        isolate_tests(payload.source, focal.qualified_name, slice.index);
    if (auto* ierr = std::get_if<IsolationError>(&isolated)) {
      // Unparseable or test-less files become one raw candidate so the
      // repair loop gets a chance at them.
      TestCandidate raw;
      raw.focal = focal.qualified_name;
      raw.slice_index = slice.index;
      raw.test_name = "test_file";
      raw.id = focal.qualified_name + "/slice-" +
               std::to_string(slice.index) + "/raw/r0";
      raw.source = payload.source;
      candidates.push_back(std::move(raw));
      work.notes.push_back(focal.qualified_name + " slice " +
                           std::to_string(slice.index) +
                           ": isolation failed (" + ierr->message +
                           "), kept whole file");
      continue;
    }
    for (auto& c : std::get<std::vector<TestCandidate>>(isolated))
      candidates.push_back(std::move(c));
  }

  // Execute, repair failures, aggregate coverage over the accepted suite.
  minilang::RawCoverage suite_coverage;
  for (auto& candidate : candidates) {
    CandidateRecord record;
    auto outcome = run_test(merged_program, candidate.source, config.limits);
    if (outcome.status == minilang::RunStatus::Passed) {
      candidate.state = CandidateState::Passed;
      record.candidate = candidate;
      record.final_outcome = std::move(outcome);
    } else {
      auto fixed = self_debug_loop(candidate, merged_program, project,
                                   backend, assets, context_prefix,
                                   config.limits, config.max_fix_rounds);
      record.candidate = fixed.candidate;
      record.final_outcome = fixed.last_outcome;
      record.attempts = std::move(fixed.attempts);
      record.abandon_reason = fixed.abandon_reason;
    }
    ++work.report.candidates_total;
    if (record.candidate.state == CandidateState::Passed) {
      ++work.report.candidates_passed;
      suite_coverage.merge(record.final_outcome.coverage);
    } else {
      switch (record.final_outcome.status) {
        case minilang::RunStatus::CompileError:
          ++work.report.compile_errors;
          break;
        case minilang::RunStatus::RuntimeError:
          ++work.report.runtime_errors;
          break;
        default:
          break;
      }
    }
    work.records.push_back(std::move(record));
  }

  auto focal_lines = minilang::statement_lines(focal_fn);
  for (const auto& [fn, line] : suite_coverage.covered_lines) {
    if (fn == focal_fn.name) {
      if (focal_lines.count(line)) ++work.report.line_covered;
    } else {
      ++work.report.callee_lines_covered;
    }
  }
  for (const auto& site : minilang::branch_sites(focal_fn)) {
    for (bool arm : {true, false}) {
      auto it = suite_coverage.branch_hits.find(
          {focal_fn.name, site.line, arm});
      if (it != suite_coverage.branch_hits.end() && it->second > 0)
        ++work.report.branch_covered;
    }
  }
  return work;
}

void persist_focal(const RunConfig& config, const FocalWork& work) {
  fs::path dir = config.out_dir / sanitize(work.report.qualified_name);
  write_file(dir / "context.md", work.context_md);
  if (!work.slices_json.empty())
    write_file(dir / "slices.json", work.slices_json);

  std::string fixlog, outcomes;
  for (const auto& rec : work.records) {
    const auto& c = rec.candidate;
    write_file(dir / ("slice-" + std::to_string(c.slice_index)) /
                   ("test-" + sanitize(c.test_name) + ".mini"),
               c.source);
    for (const auto& att : rec.attempts) {
      json rules = json::array();
      for (const auto& r : att.rule_fixes_applied) rules.push_back(r);
      json j{{"candidate", att.candidate_id},
             {"round", att.round},
             {"trigger", status_name(att.trigger_status)},
             {"trigger_message", att.trigger_message},
             {"rule_fixes_applied", rules},
             {"llm_called", att.llm_called},
             {"result", att.result == FixResult::NowPassing ? "now_passing"
                        : att.result == FixResult::StillFailing
                            ? "still_failing"
                            : "abandoned"}};
      fixlog += j.dump() + "\n";
    }
    json oj{{"id", c.id},
            {"state", candidate_state_name(c.state)},
            {"status", status_name(rec.final_outcome.status)},
            {"message", rec.final_outcome.message},
            {"fix_round", c.fix_round}};
    if (rec.final_outcome.failing_line)
      oj["failing_line"] = *rec.final_outcome.failing_line;
    if (!rec.abandon_reason.empty())
      oj["abandon_reason"] = rec.abandon_reason;
    outcomes += oj.dump() + "\n";
  }
  write_file(dir / "fixlog.jsonl", fixlog);
  write_file(dir / "outcomes.jsonl", outcomes);
}

}  // namespace

void apply_config_file(const fs::path& file, RunConfig& config) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read config file " + file.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key == "project") config.project_root = value;
    else if (key == "threshold") config.threshold = std::stoi(value);
    else if (key == "backend") {
      if (value == "live") config.backend = BackendMode::Live;
      else if (value == "record") config.backend = BackendMode::Record;
      else if (value == "replay") config.backend = BackendMode::Replay;
      else throw std::runtime_error("unknown backend '" + value + "'");
    } else if (key == "max_fix_rounds") config.max_fix_rounds = std::stoi(value);
    else if (key == "tests_per_slice") config.tests_per_slice = std::stoi(value);
    else if (key == "context_depth") config.context_depth = std::stoi(value);
    else if (key == "target_decisions_per_slice")
      config.target_decisions_per_slice = std::stoi(value);
    else if (key == "max_steps") config.limits.max_steps = std::stoll(value);
    else if (key == "max_call_depth")
      config.limits.max_call_depth = std::stoi(value);
    else if (key == "out") config.out_dir = value;
    else if (key == "transcripts") config.transcripts = value;
    else if (key == "assets") config.assets_dir = value;
    else if (key == "model") config.model = value;
    else if (key == "max_output_tokens")
      config.max_output_tokens = std::stoi(value);
    else if (key == "workers") config.workers = std::stoi(value);
    else
      throw std::runtime_error("unknown config key '" + key + "'");
  }
}

std::variant<PipelineResult, FatalError> run_pipeline(
    const RunConfig& config, Backend& backend, const PromptAssets& assets) {
  auto loaded = load_project(config.project_root);
  if (auto* err = std::get_if<EmptyProjectError>(&loaded))
    return FatalError{err->message};
  const Project& project = std::get<Project>(loaded);

  PipelineResult result;
  result.report.project = config.project_root.generic_string();
  for (const auto& note : project.skipped)
    result.notes.push_back("skipped " + note);

  // All parseable files act as one namespace for execution. Each file is
  // reparsed from its original text so AST line numbers stay the file's
  // own; coverage keys are (function, line) and function names are unique
  // across the project, so colliding line numbers between files are fine.
  minilang::Program merged;
  merged.source_path = "<project>";
  for (const auto& pf : project.files) {
    std::string text;
    for (const auto& line : pf.lines) {
      text += line;
      text += '\n';
    }
    auto parsed = minilang::parse_program(text, pf.relative_path);
    if (auto* p = std::get_if<minilang::Program>(&parsed)) {
      for (auto& f : p->functions) merged.functions.push_back(std::move(f));
      for (auto& g : p->globals) merged.globals.push_back(std::move(g));
    }
  }
  if (auto err = minilang::check_program(merged))
    return FatalError{"project does not check: " + err->message + " (line " +
                      std::to_string(err->line) + ")"};

  auto focals = select_focal_methods(project, config.threshold);

  std::vector<FocalWork> works(focals.size());
  auto run_one = [&](size_t i) {
    const FocalMethod& focal = focals[i];
    const minilang::FunctionDecl* fn = nullptr;
    const ProjectFile* pf = project.file_of(focal.file);
    if (pf)
      for (const auto& f : pf->program.functions)
        if (f.name == focal.function_name) fn = &f;
    if (!fn) {
      works[i].report.qualified_name = focal.qualified_name;
      works[i].report.errored = true;
      works[i].report.error_message = "focal function vanished";
      return;
    }
    works[i] = process_focal(config, project, merged, focal, *fn, backend,
                             assets);
  };

  if (config.workers <= 1 || focals.size() <= 1) {
    for (size_t i = 0; i < focals.size(); ++i) run_one(i);
  } else {
    std::vector<std::future<void>> futures;
    size_t next = 0;
    while (next < focals.size()) {
      while ((int)futures.size() < config.workers && next < focals.size()) {
        futures.push_back(std::async(std::launch::async, run_one, next));
        ++next;
      }
      for (auto& f : futures) f.wait();
      futures.clear();
    }
  }

  // Single collector writes all artifacts in deterministic order.
  for (const auto& work : works) {
    persist_focal(config, work);
    result.report.methods.push_back(work.report);
    for (const auto& n : work.notes) result.notes.push_back(n);
    if (work.report.errored) {
      result.any_errored = true;
      result.notes.push_back(work.report.qualified_name + " errored: " +
                             work.report.error_message);
    }
  }

  std::string txt = render_report(result.report, ReportFormat::Text);
  if (!config.stable_output) {
    // Timestamped header kept out of --stable-output runs.
    txt = "Generated by hits\n\n" + txt;
  }
  write_file(config.out_dir / "report.txt", txt);
  write_file(config.out_dir / "report.csv",
             render_report(result.report, ReportFormat::Csv));
  write_file(config.out_dir / "report.json",
             render_report(result.report, ReportFormat::Json));
  return result;
}

}  // namespace hits
