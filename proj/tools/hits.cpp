#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hits/pipeline.hpp"

namespace {

int cmd_scan(const std::filesystem::path& project, int threshold) {
  auto scanned = hits::scan_project(project, threshold);
  if (auto* err = std::get_if<hits::EmptyProjectError>(&scanned)) {
    std::cerr << "error: " << err->message << "\n";
    return 1;
  }
  for (const auto& m : std::get<std::vector<hits::FocalMethod>>(scanned)) {
    std::cout << m.qualified_name << '\t' << m.complexity.cyclomatic << '\t'
              << m.first_line << '-' << m.last_line << "\n";
  }
  return 0;
}

int cmd_generate(const hits::RunConfig& config) {
  hits::PromptAssets assets;
  try {
    assets = hits::PromptAssets::load(config.assets_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  hits::TranscriptStore store;
  std::unique_ptr<hits::Backend> live;
  std::unique_ptr<hits::Backend> backend;
  switch (config.backend) {
    case hits::BackendMode::Live:
      backend = std::make_unique<hits::LiveBackend>(config.model);
      break;
    case hits::BackendMode::Record: {
      if (!config.transcripts.empty() &&
          std::filesystem::exists(config.transcripts))
        store = hits::TranscriptStore::open(config.transcripts);
      if (config.transcripts.empty()) {
        std::cerr << "error: --transcripts is required for record mode\n";
        return 1;
      }
      store.attach_sink(config.transcripts, config.stable_output);
      live = std::make_unique<hits::LiveBackend>(config.model);
      backend =
          std::make_unique<hits::RecordBackend>(*live, store, config.model);
      break;
    }
    case hits::BackendMode::Replay: {
      if (config.transcripts.empty()) {
        std::cerr << "error: --transcripts is required for replay mode\n";
        return 1;
      }
      store = hits::TranscriptStore::open(config.transcripts);
      backend =
          std::make_unique<hits::ReplayBackend>(store, config.model);
      break;
    }
  }

  auto result = hits::run_pipeline(config, *backend, assets);
  if (auto* fatal = std::get_if<hits::FatalError>(&result)) {
    std::cerr << "error: " << fatal->message << "\n";
    return 1;
  }
  const auto& pr = std::get<hits::PipelineResult>(result);
  for (const auto& note : pr.notes) std::cerr << "note: " << note << "\n";
  std::cout << hits::render_report(pr.report, hits::ReportFormat::Text);
  return pr.any_errored ? 2 : 0;
}

int cmd_report(const std::filesystem::path& json_path,
               const std::string& format) {
  std::ifstream in(json_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << json_path << "\n";
    return 1;
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  hits::CoverageReport report;
  try {
    report = hits::report_from_json(text);
  } catch (const std::exception& e) {
    std::cerr << "error: invalid report json: " << e.what() << "\n";
    return 1;
  }
  hits::ReportFormat fmt = hits::ReportFormat::Text;
  if (format == "csv") fmt = hits::ReportFormat::Csv;
  else if (format == "json") fmt = hits::ReportFormat::Json;
  std::cout << hits::render_report(report, fmt);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slice-guided unit test generation for MiniLang projects"};
  app.require_subcommand(1);

  hits::RunConfig config;
  std::string backend_name = "replay";
  std::string config_file;

  auto* scan = app.add_subcommand("scan", "List complex methods");
  std::filesystem::path scan_project_dir;
  int scan_threshold = 10;
  scan->add_option("--project", scan_project_dir, "Project root")->required();
  scan->add_option("--threshold", scan_threshold,
                   "Cyclomatic complexity threshold (strictly above)");

  auto* gen = app.add_subcommand("generate", "Generate and repair tests");
  gen->add_option("--project", config.project_root, "Project root");
  gen->add_option("--config", config_file, "key = value config file");
  gen->add_option("--backend", backend_name, "live|record|replay");
  gen->add_option("--threshold", config.threshold,
                  "Cyclomatic complexity threshold");
  gen->add_option("--max-fix-rounds", config.max_fix_rounds,
                  "Self-debug round cap");
  gen->add_option("--context-depth", config.context_depth,
                  "Callee context depth");
  gen->add_option("--out", config.out_dir, "Artifact directory");
  gen->add_option("--transcripts", config.transcripts,
                  "Transcript store (file for record, file or dir for replay)");
  gen->add_option("--assets", config.assets_dir, "Prompt asset directory");
  gen->add_option("--model", config.model, "Model name");
  gen->add_option("--max-output-tokens", config.max_output_tokens,
                  "Completion token budget");
  gen->add_option("--workers", config.workers, "Concurrent focal methods");
  gen->add_flag("--stable-output", config.stable_output,
                "Deterministic artifacts (no timestamps)");
  gen->add_flag("--trace", config.trace, "Verbose execution tracing");

  auto* rep = app.add_subcommand("report", "Re-render a report.json");
  std::filesystem::path report_json;
  std::string report_format = "text";
  rep->add_option("--in", report_json, "Path to report.json")->required();
  rep->add_option("--format", report_format, "text|csv|json");

  CLI11_PARSE(app, argc, argv);

  if (scan->parsed()) return cmd_scan(scan_project_dir, scan_threshold);

  if (gen->parsed()) {
    try {
      // Config file first, explicit flags override.
      if (!config_file.empty()) {
        hits::RunConfig from_file = config;
        hits::apply_config_file(config_file, from_file);
        // Re-apply CLI values on top of file values for options the user set.
        hits::RunConfig cli = config;
        config = from_file;
        if (gen->count("--project")) config.project_root = cli.project_root;
        if (gen->count("--threshold")) config.threshold = cli.threshold;
        if (gen->count("--max-fix-rounds"))
          config.max_fix_rounds = cli.max_fix_rounds;
        if (gen->count("--context-depth"))
          config.context_depth = cli.context_depth;
        if (gen->count("--out")) config.out_dir = cli.out_dir;
        if (gen->count("--transcripts")) config.transcripts = cli.transcripts;
        if (gen->count("--assets")) config.assets_dir = cli.assets_dir;
        if (gen->count("--model")) config.model = cli.model;
        if (gen->count("--max-output-tokens"))
          config.max_output_tokens = cli.max_output_tokens;
        if (gen->count("--workers")) config.workers = cli.workers;
      }
      if (gen->count("--backend") || config_file.empty()) {
        if (backend_name == "live") config.backend = hits::BackendMode::Live;
        else if (backend_name == "record")
          config.backend = hits::BackendMode::Record;
        else if (backend_name == "replay")
          config.backend = hits::BackendMode::Replay;
        else {
          std::cerr << "error: unknown backend '" << backend_name << "'\n";
          return 1;
        }
      }
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
    if (config.project_root.empty()) {
      std::cerr << "error: --project (or a config file setting it) is "
                   "required\n";
      return 1;
    }
    return cmd_generate(config);
  }

  return cmd_report(report_json, report_format);
}
