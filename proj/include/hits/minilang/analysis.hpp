#pragma once

#include <set>
#include <vector>

#include "hits/minilang/ast.hpp"

namespace hits::minilang {

struct ComplexityScore {
  int decisions = 0;
  int cyclomatic = 1;  // decisions + 1
};

/// McCabe-style complexity: one decision per if/while/for statement plus
/// one per `&&`/`||` operator anywhere in the body.
ComplexityScore cyclomatic_complexity(const FunctionDecl& fn);

/// Lines carrying executable statements (compound headers included,
/// bare `}` lines excluded).
std::set<int> statement_lines(const FunctionDecl& fn);

/// A branch site is the condition of one if/while/for statement.
struct BranchSite {
  int line = 0;
};

std::vector<BranchSite> branch_sites(const FunctionDecl& fn);

/// Decision points (if/while/for statements and short-circuit operators)
/// attributed to the line they appear on.
std::vector<int> decision_lines(const FunctionDecl& fn);

/// Decision count of a single statement including nested statements and
/// short-circuit operators in any contained expression.
int statement_decisions(const Stmt& s);

/// Function names called anywhere in the body, in first-occurrence
/// evaluation order (builtins len/str excluded).
std::vector<std::string> called_functions(const FunctionDecl& fn);

/// Variable names read anywhere in the body, in first-occurrence order.
std::vector<std::string> referenced_names(const FunctionDecl& fn);

}  // namespace hits::minilang
