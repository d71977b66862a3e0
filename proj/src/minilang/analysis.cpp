#include "hits/minilang/analysis.hpp"

#include <functional>

namespace hits::minilang {

namespace {

void walk_exprs(const Stmt& s, const std::function<void(const Expr&)>& fn);

void walk_expr(const Expr& e, const std::function<void(const Expr&)>& fn) {
  fn(e);
  for (const auto& a : e.args) walk_expr(*a, fn);
}

void walk_block(const Block& b, const std::function<void(const Stmt&)>& fn) {
  for (const auto& s : b.stmts) {
    fn(*s);
    walk_block(s->body, fn);
    walk_block(s->else_body, fn);
  }
}

void walk_exprs(const Stmt& s, const std::function<void(const Expr&)>& fn) {
  if (s.cond) walk_expr(*s.cond, fn);
  if (s.value) walk_expr(*s.value, fn);
  if (s.target_index) walk_expr(*s.target_index, fn);
  if (s.range_from) walk_expr(*s.range_from, fn);
  if (s.range_to) walk_expr(*s.range_to, fn);
}

bool is_branching(const Stmt& s) {
  return s.kind == Stmt::Kind::If || s.kind == Stmt::Kind::While ||
         s.kind == Stmt::Kind::For;
}

bool is_short_circuit(const Expr& e) {
  return e.kind == Expr::Kind::Binary && (e.name == "&&" || e.name == "||");
}

}  // namespace

ComplexityScore cyclomatic_complexity(const FunctionDecl& fn) {
  ComplexityScore score;
  walk_block(fn.body, [&](const Stmt& s) {
    if (is_branching(s)) ++score.decisions;
    walk_exprs(s, [&](const Expr& e) {
      if (is_short_circuit(e)) ++score.decisions;
    });
  });
  score.cyclomatic = score.decisions + 1;
  return score;
}

std::set<int> statement_lines(const FunctionDecl& fn) {
  std::set<int> lines;
  walk_block(fn.body, [&](const Stmt& s) { lines.insert(s.line); });
  return lines;
}

std::vector<BranchSite> branch_sites(const FunctionDecl& fn) {
  std::vector<BranchSite> sites;
  walk_block(fn.body, [&](const Stmt& s) {
    if (is_branching(s)) sites.push_back({s.line});
  });
  return sites;
}

std::vector<int> decision_lines(const FunctionDecl& fn) {
  std::vector<int> lines;
  walk_block(fn.body, [&](const Stmt& s) {
    if (is_branching(s)) lines.push_back(s.line);
    walk_exprs(s, [&](const Expr& e) {
      if (is_short_circuit(e)) lines.push_back(e.line);
    });
  });
  return lines;
}

int statement_decisions(const Stmt& s) {
  int count = 0;
  auto count_expr = [&](const Expr& e) {
    if (is_short_circuit(e)) ++count;
  };
  std::function<void(const Stmt&)> visit = [&](const Stmt& st) {
    if (is_branching(st)) ++count;
    walk_exprs(st, count_expr);
    for (const auto& c : st.body.stmts) visit(*c);
    for (const auto& c : st.else_body.stmts) visit(*c);
  };
  visit(s);
  return count;
}

std::vector<std::string> called_functions(const FunctionDecl& fn) {
  std::vector<std::string> names;
  walk_block(fn.body, [&](const Stmt& s) {
    walk_exprs(s, [&](const Expr& e) {
      if (e.kind != Expr::Kind::Call) return;
      for (const auto& n : names)
        if (n == e.name) return;
      names.push_back(e.name);
    });
  });
  return names;
}

std::vector<std::string> referenced_names(const FunctionDecl& fn) {
  std::vector<std::string> names;
  walk_block(fn.body, [&](const Stmt& s) {
    walk_exprs(s, [&](const Expr& e) {
      if (e.kind != Expr::Kind::Var) return;
      for (const auto& n : names)
        if (n == e.name) return;
      names.push_back(e.name);
    });
  });
  return names;
}

}  // namespace hits::minilang
