#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hits/minilang/analysis.hpp"
#include "hits/minilang/ast.hpp"

namespace hits {

/// One parsed .mini file with its raw lines kept for verbatim extraction.
struct ProjectFile {
  std::string relative_path;
  minilang::Program program;
  std::vector<std::string> lines;  // 1-based via lines[i-1]
};

struct Project {
  std::vector<ProjectFile> files;
  std::vector<std::string> skipped;  // "path: parse error ..." notes

  const ProjectFile* file_of(const std::string& relative_path) const;
  const minilang::FunctionDecl* find_function(const std::string& name,
                                              const ProjectFile** file = nullptr) const;
};

struct FocalMethod {
  std::string qualified_name;  // "file::function"
  std::string file;
  std::string function_name;
  minilang::ComplexityScore complexity;
  std::string source_text;  // verbatim span, doc lines excluded
  int first_line = 0;
  int last_line = 0;
};

struct ContextBundle {
  std::vector<std::string> global_decls;  // declaration texts
  std::vector<std::pair<std::string, std::string>> callee_bodies;
  std::vector<std::pair<std::string, std::string>> callee_docs;
  std::optional<std::string> focal_doc;
};

struct EmptyProjectError {
  std::string message;
};

/// Parse every .mini file under root (recursively, path-sorted).
std::variant<Project, EmptyProjectError> load_project(
    const std::filesystem::path& root);

/// All functions with cyclomatic complexity strictly above `threshold`,
/// ordered by (file path, first line).
std::vector<FocalMethod> select_focal_methods(const Project& project,
                                              int threshold);

std::variant<std::vector<FocalMethod>, EmptyProjectError> scan_project(
    const std::filesystem::path& root, int threshold);

/// Direct-callee bodies and docs plus referenced globals, in call-site
/// first-occurrence order. `depth` > 1 additionally pulls transitive
/// callees, breadth-first.
ContextBundle build_context(const Project& project, const FocalMethod& focal,
                            int depth = 1);

/// Markdown rendering used both for out/<focal>/context.md and as the
/// prompt prefix.
std::string render_context(const FocalMethod& focal, const ContextBundle& ctx);

std::string verbatim_span(const ProjectFile& file, int first_line,
                          int last_line);

}  // namespace hits
