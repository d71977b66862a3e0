#pragma once

#include <string>

#include "hits/minilang/ast.hpp"

namespace hits::minilang {

/// Canonical source form: 4-space indent, one statement per line,
/// `} else {` on the closing line of the then-block. Re-parsing the
/// output yields a structurally equal AST.
std::string print_program(const Program& program);
std::string print_function(const FunctionDecl& fn);
std::string print_global(const GlobalDecl& g);
std::string print_expr(const Expr& e);

}  // namespace hits::minilang
