#pragma once

#include <string>
#include <variant>

#include "hits/minilang/ast.hpp"

namespace hits::minilang {

struct ParseError {
  int line = 0;
  int col = 0;
  std::string message;
};

using ParseResult = std::variant<Program, ParseError>;

/// Parse a MiniLang compilation unit. The grammar is documented in
/// docs/minilang.md; one statement per line, mandatory braces.
ParseResult parse_program(const std::string& source_text,
                          const std::string& source_path);

inline bool parse_ok(const ParseResult& r) {
  return std::holds_alternative<Program>(r);
}

}  // namespace hits::minilang
