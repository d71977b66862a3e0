#include "hits/focal.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "hits/minilang/parser.hpp"
#include "hits/minilang/printer.hpp"

namespace hits {

namespace fs = std::filesystem;
using minilang::FunctionDecl;
using minilang::Program;

const ProjectFile* Project::file_of(const std::string& relative_path) const {
  for (const auto& f : files)
    if (f.relative_path == relative_path) return &f;
  return nullptr;
}

const FunctionDecl* Project::find_function(const std::string& name,
                                           const ProjectFile** file) const {
  for (const auto& pf : files) {
    for (const auto& fn : pf.program.functions) {
      if (fn.name == name) {
        if (file) *file = &pf;
        return &fn;
      }
    }
  }
  return nullptr;
}

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string current;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\r') continue;
    if (c == '\n') {
      lines.push_back(current);
      current.clear();
      continue;
    }
    current.push_back(c);
  }
  lines.push_back(current);
  return lines;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string verbatim_span(const ProjectFile& file, int first_line,
                          int last_line) {
  std::string out;
  for (int i = first_line; i <= last_line && i <= (int)file.lines.size(); ++i) {
    out += file.lines[i - 1];
    out += '\n';
  }
  return out;
}

std::variant<Project, EmptyProjectError> load_project(const fs::path& root) {
  if (!fs::exists(root))
    return EmptyProjectError{"project root does not exist: " + root.string()};
  std::vector<fs::path> paths;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".mini")
      paths.push_back(entry.path());
  }
  if (paths.empty())
    return EmptyProjectError{"no .mini files under " + root.string()};
  std::sort(paths.begin(), paths.end());

  Project project;
  for (const auto& p : paths) {
    std::string rel = fs::relative(p, root).generic_string();
    std::string text = read_file(p);
    auto parsed = minilang::parse_program(text, rel);
    if (auto* err = std::get_if<minilang::ParseError>(&parsed)) {
      project.skipped.push_back(rel + ": parse error at line " +
                                std::to_string(err->line) + ": " +
                                err->message);
      continue;
    }
    ProjectFile pf;
    pf.relative_path = rel;
    pf.program = std::move(std::get<Program>(parsed));
    pf.lines = split_lines(text);
    project.files.push_back(std::move(pf));
  }
  return project;
}

std::vector<FocalMethod> select_focal_methods(const Project& project,
                                              int threshold) {
  std::vector<FocalMethod> out;
  for (const auto& pf : project.files) {
    for (const auto& fn : pf.program.functions) {
      auto score = minilang::cyclomatic_complexity(fn);
      if (score.cyclomatic <= threshold) continue;
      FocalMethod fm;
      fm.qualified_name = pf.relative_path + "::" + fn.name;
      fm.file = pf.relative_path;
      fm.function_name = fn.name;
      fm.complexity = score;
      fm.first_line = fn.first_line;
      fm.last_line = fn.last_line;
      fm.source_text = verbatim_span(pf, fn.first_line, fn.last_line);
      out.push_back(std::move(fm));
    }
  }
  // Files are path-sorted already; functions appear in declaration order.
  std::sort(out.begin(), out.end(), [](const FocalMethod& a, const FocalMethod& b) {
    if (a.file != b.file) return a.file < b.file;
    return a.first_line < b.first_line;
  });
  return out;
}

std::variant<std::vector<FocalMethod>, EmptyProjectError> scan_project(
    const fs::path& root, int threshold) {
  auto loaded = load_project(root);
  if (auto* err = std::get_if<EmptyProjectError>(&loaded)) return *err;
  return select_focal_methods(std::get<Project>(loaded), threshold);
}

ContextBundle build_context(const Project& project, const FocalMethod& focal,
                            int depth) {
  ContextBundle bundle;
  const ProjectFile* focal_file = project.file_of(focal.file);
  const FunctionDecl* focal_fn = nullptr;
  if (focal_file) {
    for (const auto& fn : focal_file->program.functions)
      if (fn.name == focal.function_name) focal_fn = &fn;
  }
  if (!focal_fn) return bundle;
  bundle.focal_doc = focal_fn->doc;

  std::vector<std::string> frontier = minilang::called_functions(*focal_fn);
  std::vector<std::string> seen;
  auto known = [&](const std::string& n) {
    return std::find(seen.begin(), seen.end(), n) != seen.end();
  };
  for (int level = 0; level < depth && !frontier.empty(); ++level) {
    std::vector<std::string> next;
    for (const auto& name : frontier) {
      if (name == focal.function_name || known(name)) continue;
      seen.push_back(name);
      const ProjectFile* where = nullptr;
      const FunctionDecl* callee = project.find_function(name, &where);
      if (!callee) {
        bundle.callee_bodies.emplace_back(name, "");
        continue;
      }
      bundle.callee_bodies.emplace_back(
          name, verbatim_span(*where, callee->first_line, callee->last_line));
      if (callee->doc) bundle.callee_docs.emplace_back(name, *callee->doc);
      for (const auto& n : minilang::called_functions(*callee))
        next.push_back(n);
    }
    frontier = std::move(next);
  }

  // Globals the focal body references, in first-occurrence order.
  for (const auto& name : minilang::referenced_names(*focal_fn)) {
    bool found = false;
    for (const auto& pf : project.files) {
      for (const auto& g : pf.program.globals) {
        if (g.name == name) {
          bundle.global_decls.push_back(minilang::print_global(g));
          found = true;
          break;
        }
      }
      if (found) break;
    }
  }
  return bundle;
}

std::string render_context(const FocalMethod& focal,
                           const ContextBundle& ctx) {
  std::string out;
  out += "## Focal method\n\n";
  out += "`" + focal.qualified_name + "` (cyclomatic complexity " +
         std::to_string(focal.complexity.cyclomatic) + ", lines " +
         std::to_string(focal.first_line) + "-" +
         std::to_string(focal.last_line) + ")\n\n";
  if (ctx.focal_doc) out += "Doc: " + *ctx.focal_doc + "\n\n";
  out += "```mini\n" + focal.source_text + "```\n\n";
  if (!ctx.global_decls.empty()) {
    out += "## Globals referenced\n\n```mini\n";
    for (const auto& g : ctx.global_decls) out += g;
    out += "```\n\n";
  }
  if (!ctx.callee_bodies.empty()) {
    out += "## Functions invoked by the focal method\n\n";
    for (const auto& [name, body] : ctx.callee_bodies) {
      if (body.empty()) {
        out += "- `" + name + "` (not defined in this project)\n";
        continue;
      }
      out += "### `" + name + "`\n\n";
      for (const auto& [dn, doc] : ctx.callee_docs) {
        if (dn == name) {
          out += "Doc: " + doc + "\n\n";
          break;
        }
      }
      out += "```mini\n" + body + "```\n\n";
    }
  }
  return out;
}

}  // namespace hits
