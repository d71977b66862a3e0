#include "hits/minilang/lexer.hpp"

#include <cctype>
#include <unordered_set>

namespace hits::minilang {

namespace {

const std::unordered_set<std::string> kKeywords = {
    "fn",     "let",  "if",    "else", "while", "for",  "in",
    "return", "assert", "print", "true", "false", "len",  "str",
    "int",    "bool", "string"};

bool is_ident_start(char c) { return std::isalpha((unsigned char)c) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum((unsigned char)c) || c == '_'; }

}  // namespace

LexResult lex(const std::string& raw) {
  std::string source;
  source.reserve(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '\r' && i + 1 < raw.size() && raw[i + 1] == '\n') continue;
    if (raw[i] == '\r') {
      source.push_back('\n');
      continue;
    }
    source.push_back(raw[i]);
  }

  LexResult out;
  int line = 1, col = 1;
  size_t i = 0;
  std::string pending_doc;
  bool have_doc = false;

  auto fail = [&](const std::string& msg) {
    out.ok = false;
    out.error = {line, col, msg};
    return out;
  };
  auto push = [&](Token::Kind k, std::string text, int tl, int tc) {
    if (have_doc) {
      out.doc_comments.emplace_back(tl, pending_doc);
      pending_doc.clear();
      have_doc = false;
    }
    out.tokens.push_back({k, std::move(text), tl, tc});
  };

  while (i < source.size()) {
    char c = source[i];
    if (c == '\n') {
      ++i;
      ++line;
      col = 1;
      continue;
    }
    if (c == ' ' || c == '\t') {
      ++i;
      ++col;
      continue;
    }
    if (c == '/' && i + 1 < source.size() && source[i + 1] == '/') {
      bool doc = i + 2 < source.size() && source[i + 2] == '/' &&
                 !(i + 3 < source.size() && source[i + 3] == '/');
      size_t start = i + (doc ? 3 : 2);
      size_t end = start;
      while (end < source.size() && source[end] != '\n') ++end;
      if (doc) {
        std::string text = source.substr(start, end - start);
        if (!text.empty() && text[0] == ' ') text.erase(0, 1);
        if (have_doc) pending_doc += '\n';
        pending_doc += text;
        have_doc = true;
      }
      col += int(end - i);
      i = end;
      continue;
    }
    int tl = line, tc = col;
    if (is_ident_start(c)) {
      size_t start = i;
      while (i < source.size() && is_ident_char(source[i])) {
        ++i;
        ++col;
      }
      std::string text = source.substr(start, i - start);
      Token::Kind kind =
          kKeywords.count(text) ? Token::Kind::Keyword : Token::Kind::Ident;
      push(kind, std::move(text), tl, tc);
      continue;
    }
    if (std::isdigit((unsigned char)c)) {
      size_t start = i;
      while (i < source.size() && std::isdigit((unsigned char)source[i])) {
        ++i;
        ++col;
      }
      push(Token::Kind::Int, source.substr(start, i - start), tl, tc);
      continue;
    }
    if (c == '"') {
      ++i;
      ++col;
      std::string text;
      bool closed = false;
      while (i < source.size()) {
        char d = source[i];
        if (d == '\n') break;
        if (d == '"') {
          ++i;
          ++col;
          closed = true;
          break;
        }
        if (d == '\\') {
          if (i + 1 >= source.size()) break;
          char e = source[i + 1];
          switch (e) {
            case 'n': text.push_back('\n'); break;
            case 't': text.push_back('\t'); break;
            case '\\': text.push_back('\\'); break;
            case '"': text.push_back('"'); break;
            default:
              return fail(std::string("unknown escape \\") + e);
          }
          i += 2;
          col += 2;
          continue;
        }
        text.push_back(d);
        ++i;
        ++col;
      }
      if (!closed) return fail("unterminated string literal");
      push(Token::Kind::String, std::move(text), tl, tc);
      continue;
    }
    // Punctuation, longest match first.
    static const char* two_char[] = {"<=", ">=", "==", "!=", "&&",
                                     "||", "..", "->"};
    std::string two = source.substr(i, 2);
    bool matched = false;
    for (const char* p : two_char) {
      if (two == p) {
        push(Token::Kind::Punct, two, tl, tc);
        i += 2;
        col += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    static const std::string one_char = "+-*/%<>!=(){}[],:;";
    if (one_char.find(c) != std::string::npos) {
      push(Token::Kind::Punct, std::string(1, c), tl, tc);
      ++i;
      ++col;
      continue;
    }
    return fail(std::string("unknown token '") + c + "'");
  }
  out.tokens.push_back({Token::Kind::Eof, "", line, col});
  return out;
}

}  // namespace hits::minilang
