#pragma once

#include <string>
#include <vector>

namespace hits::minilang {

struct Token {
  enum class Kind { Ident, Keyword, Int, String, Punct, Eof };
  Kind kind;
  std::string text;  // decoded payload for String, lexeme otherwise
  int line = 0;
  int col = 0;
};

struct LexError {
  int line = 0;
  int col = 0;
  std::string message;
};

struct LexResult {
  std::vector<Token> tokens;
  // Doc comments keyed by the line of the first token they precede.
  // A run of consecutive `///` lines is joined with '\n'.
  std::vector<std::pair<int, std::string>> doc_comments;
  bool ok = true;
  LexError error;
};

/// Tokenize MiniLang source. CRLF is normalized to LF before scanning.
LexResult lex(const std::string& source);

}  // namespace hits::minilang
