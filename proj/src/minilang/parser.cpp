#include "hits/minilang/parser.hpp"

#include <map>

#include "hits/minilang/lexer.hpp"

namespace hits::minilang {

namespace {

struct Parser {
  const std::vector<Token>& toks;
  std::map<int, std::string> docs;  // first-token line -> doc text
  size_t pos = 0;
  ParseError err;
  bool failed = false;
  int last_stmt_line = 0;  // enforces one statement per line per function

  const Token& peek(int ahead = 0) const {
    size_t p = pos + ahead;
    return p < toks.size() ? toks[p] : toks.back();
  }
  const Token& cur() const { return peek(); }
  Token next() { return toks[pos < toks.size() - 1 ? pos++ : pos]; }

  bool at_punct(const std::string& p) const {
    return cur().kind == Token::Kind::Punct && cur().text == p;
  }
  bool at_kw(const std::string& k) const {
    return cur().kind == Token::Kind::Keyword && cur().text == k;
  }
  bool eat_punct(const std::string& p) {
    if (at_punct(p)) {
      next();
      return true;
    }
    return false;
  }
  bool eat_kw(const std::string& k) {
    if (at_kw(k)) {
      next();
      return true;
    }
    return false;
  }

  void fail(const std::string& msg) {
    if (!failed) {
      failed = true;
      err = {cur().line, cur().col, msg};
    }
  }
  bool expect_punct(const std::string& p) {
    if (eat_punct(p)) return true;
    if (p == "}" && cur().kind == Token::Kind::Eof)
      fail("unbalanced braces: expected '}' before end of input");
    else
      fail("expected '" + p + "', found '" + cur().text + "'");
    return false;
  }
  bool expect_kw(const std::string& k) {
    if (eat_kw(k)) return true;
    fail("expected '" + k + "'");
    return false;
  }
  std::string expect_ident() {
    if (cur().kind == Token::Kind::Ident) return next().text;
    fail("expected identifier, found '" + cur().text + "'");
    return "";
  }

  std::optional<Type> parse_type() {
    if (eat_kw("int")) return Type::Int;
    if (eat_kw("bool")) return Type::Bool;
    if (eat_kw("string")) return Type::String;
    if (eat_punct("[")) {
      if (!expect_kw("int")) return std::nullopt;
      if (!expect_punct("]")) return std::nullopt;
      return Type::IntArray;
    }
    fail("expected type");
    return std::nullopt;
  }

  ExprPtr make(Expr::Kind k, int line) {
    auto e = std::make_unique<Expr>();
    e->kind = k;
    e->line = line;
    return e;
  }

  ExprPtr parse_primary() {
    int line = cur().line;
    if (cur().kind == Token::Kind::Int) {
      auto e = make(Expr::Kind::IntLit, line);
      e->int_val = std::stoll(next().text);
      return e;
    }
    if (cur().kind == Token::Kind::String) {
      auto e = make(Expr::Kind::StringLit, line);
      e->str_val = next().text;
      return e;
    }
    if (at_kw("true") || at_kw("false")) {
      auto e = make(Expr::Kind::BoolLit, line);
      e->bool_val = next().text == "true";
      return e;
    }
    if (at_kw("len") || at_kw("str")) {
      bool is_len = cur().text == "len";
      next();
      if (!expect_punct("(")) return nullptr;
      auto arg = parse_expr();
      if (!arg) return nullptr;
      if (!expect_punct(")")) return nullptr;
      auto e = make(is_len ? Expr::Kind::Len : Expr::Kind::Str, line);
      e->args.push_back(std::move(arg));
      return e;
    }
    if (cur().kind == Token::Kind::Ident) {
      std::string name = next().text;
      if (eat_punct("(")) {
        auto e = make(Expr::Kind::Call, line);
        e->name = name;
        if (!at_punct(")")) {
          do {
            auto a = parse_expr();
            if (!a) return nullptr;
            e->args.push_back(std::move(a));
          } while (eat_punct(","));
        }
        if (!expect_punct(")")) return nullptr;
        return e;
      }
      auto e = make(Expr::Kind::Var, line);
      e->name = name;
      return e;
    }
    if (eat_punct("(")) {
      auto e = parse_expr();
      if (!e) return nullptr;
      if (!expect_punct(")")) return nullptr;
      return e;
    }
    if (eat_punct("[")) {
      auto e = make(Expr::Kind::ArrayLit, line);
      if (!at_punct("]")) {
        do {
          auto a = parse_expr();
          if (!a) return nullptr;
          e->args.push_back(std::move(a));
        } while (eat_punct(","));
      }
      if (!expect_punct("]")) return nullptr;
      return e;
    }
    fail("expected expression, found '" + cur().text + "'");
    return nullptr;
  }

  ExprPtr parse_postfix() {
    auto e = parse_primary();
    if (!e) return nullptr;
    while (at_punct("[")) {
      int line = cur().line;
      next();
      auto idx = parse_expr();
      if (!idx) return nullptr;
      if (!expect_punct("]")) return nullptr;
      auto n = make(Expr::Kind::Index, line);
      n->args.push_back(std::move(e));
      n->args.push_back(std::move(idx));
      e = std::move(n);
    }
    return e;
  }

  ExprPtr parse_unary() {
    if (at_punct("-") || at_punct("!")) {
      int line = cur().line;
      std::string op = next().text;
      auto operand = parse_unary();
      if (!operand) return nullptr;
      auto e = make(Expr::Kind::Unary, line);
      e->name = op;
      e->args.push_back(std::move(operand));
      return e;
    }
    return parse_postfix();
  }

  ExprPtr parse_binary_level(int level) {
    static const std::vector<std::vector<std::string>> levels = {
        {"||"}, {"&&"}, {"<", "<=", ">", ">=", "==", "!="},
        {"+", "-"},
        {"*", "/", "%"}};
    if (level >= (int)levels.size()) return parse_unary();
    auto lhs = parse_binary_level(level + 1);
    if (!lhs) return nullptr;
    for (;;) {
      bool matched = false;
      for (const auto& op : levels[level]) {
        if (at_punct(op)) {
          int line = cur().line;
          next();
          auto rhs = parse_binary_level(level + 1);
          if (!rhs) return nullptr;
          auto e = make(Expr::Kind::Binary, line);
          e->name = op;
          e->args.push_back(std::move(lhs));
          e->args.push_back(std::move(rhs));
          lhs = std::move(e);
          matched = true;
          break;
        }
      }
      if (!matched) break;
    }
    return lhs;
  }

  ExprPtr parse_expr() { return parse_binary_level(0); }

  bool parse_block(Block& out) {
    out.open_line = cur().line;
    if (!expect_punct("{")) return false;
    while (!at_punct("}")) {
      if (cur().kind == Token::Kind::Eof) {
        fail("unbalanced braces: expected '}' before end of input");
        return false;
      }
      auto s = parse_stmt();
      if (!s) return false;
      out.stmts.push_back(std::move(s));
    }
    out.close_line = cur().line;
    next();
    return true;
  }

  StmtPtr make_stmt(Stmt::Kind k, int line) {
    auto s = std::make_unique<Stmt>();
    s->kind = k;
    s->line = line;
    s->end_line = line;
    return s;
  }

  StmtPtr parse_stmt() {
    int line = cur().line;
    if (line <= last_stmt_line) {
      fail("only one statement per line is allowed");
      return nullptr;
    }
    last_stmt_line = line;

    if (eat_kw("let")) {
      auto s = make_stmt(Stmt::Kind::Let, line);
      s->name = expect_ident();
      if (failed) return nullptr;
      if (eat_punct(":")) {
        s->decl_type = parse_type();
        if (failed) return nullptr;
      }
      if (!expect_punct("=")) return nullptr;
      s->value = parse_expr();
      if (!s->value) return nullptr;
      if (!expect_punct(";")) return nullptr;
      return s;
    }
    if (eat_kw("if")) {
      auto s = make_stmt(Stmt::Kind::If, line);
      if (!expect_punct("(")) return nullptr;
      s->cond = parse_expr();
      if (!s->cond) return nullptr;
      if (!expect_punct(")")) return nullptr;
      if (!parse_block(s->body)) return nullptr;
      s->end_line = s->body.close_line;
      if (eat_kw("else")) {
        s->has_else = true;
        if (!parse_block(s->else_body)) return nullptr;
        s->end_line = s->else_body.close_line;
      }
      return s;
    }
    if (eat_kw("while")) {
      auto s = make_stmt(Stmt::Kind::While, line);
      if (!expect_punct("(")) return nullptr;
      s->cond = parse_expr();
      if (!s->cond) return nullptr;
      if (!expect_punct(")")) return nullptr;
      if (!parse_block(s->body)) return nullptr;
      s->end_line = s->body.close_line;
      return s;
    }
    if (eat_kw("for")) {
      auto s = make_stmt(Stmt::Kind::For, line);
      if (!expect_punct("(")) return nullptr;
      s->loop_var = expect_ident();
      if (failed) return nullptr;
      if (!expect_kw("in")) return nullptr;
      s->range_from = parse_expr();
      if (!s->range_from) return nullptr;
      if (!expect_punct("..")) return nullptr;
      s->range_to = parse_expr();
      if (!s->range_to) return nullptr;
      if (!expect_punct(")")) return nullptr;
      if (!parse_block(s->body)) return nullptr;
      s->end_line = s->body.close_line;
      return s;
    }
    if (eat_kw("return")) {
      auto s = make_stmt(Stmt::Kind::Return, line);
      if (!at_punct(";")) {
        s->value = parse_expr();
        if (!s->value) return nullptr;
      }
      if (!expect_punct(";")) return nullptr;
      return s;
    }
    if (eat_kw("assert")) {
      auto s = make_stmt(Stmt::Kind::Assert, line);
      if (!expect_punct("(")) return nullptr;
      s->cond = parse_expr();
      if (!s->cond) return nullptr;
      if (!expect_punct(")")) return nullptr;
      if (!expect_punct(";")) return nullptr;
      return s;
    }
    if (eat_kw("print")) {
      auto s = make_stmt(Stmt::Kind::Print, line);
      if (!expect_punct("(")) return nullptr;
      s->value = parse_expr();
      if (!s->value) return nullptr;
      if (!expect_punct(")")) return nullptr;
      if (!expect_punct(";")) return nullptr;
      return s;
    }
    if (cur().kind == Token::Kind::Ident) {
      std::string name = next().text;
      if (eat_punct("=")) {
        auto s = make_stmt(Stmt::Kind::Assign, line);
        s->name = name;
        s->value = parse_expr();
        if (!s->value) return nullptr;
        if (!expect_punct(";")) return nullptr;
        return s;
      }
      if (eat_punct("[")) {
        auto s = make_stmt(Stmt::Kind::IndexAssign, line);
        s->name = name;
        s->target_index = parse_expr();
        if (!s->target_index) return nullptr;
        if (!expect_punct("]")) return nullptr;
        if (!expect_punct("=")) return nullptr;
        s->value = parse_expr();
        if (!s->value) return nullptr;
        if (!expect_punct(";")) return nullptr;
        return s;
      }
      if (at_punct("(")) {
        next();
        auto call = make(Expr::Kind::Call, line);
        call->name = name;
        if (!at_punct(")")) {
          do {
            auto a = parse_expr();
            if (!a) return nullptr;
            call->args.push_back(std::move(a));
          } while (eat_punct(","));
        }
        if (!expect_punct(")")) return nullptr;
        if (!expect_punct(";")) return nullptr;
        auto s = make_stmt(Stmt::Kind::ExprCall, line);
        s->value = std::move(call);
        return s;
      }
      fail("malformed statement starting with '" + name + "'");
      return nullptr;
    }
    fail("expected statement, found '" + cur().text + "'");
    return nullptr;
  }

  std::optional<std::string> doc_for_line(int line) {
    auto it = docs.find(line);
    if (it == docs.end()) return std::nullopt;
    return it->second;
  }

  ParseResult parse(const std::string& source_path) {
    Program prog;
    prog.source_path = source_path;
    while (cur().kind != Token::Kind::Eof) {
      int decl_line = cur().line;
      auto doc = doc_for_line(decl_line);
      if (eat_kw("fn")) {
        FunctionDecl fn;
        fn.first_line = decl_line;
        fn.doc = doc;
        fn.name = expect_ident();
        if (failed) return err;
        if (!expect_punct("(")) return err;
        if (!at_punct(")")) {
          do {
            Param p;
            p.name = expect_ident();
            if (failed) return err;
            if (!expect_punct(":")) return err;
            auto t = parse_type();
            if (!t) return err;
            p.type = *t;
            fn.params.push_back(std::move(p));
          } while (eat_punct(","));
        }
        if (!expect_punct(")")) return err;
        if (eat_punct("->")) {
          auto t = parse_type();
          if (!t) return err;
          fn.return_type = *t;
        }
        last_stmt_line = 0;
        if (!parse_block(fn.body)) return err;
        fn.last_line = fn.body.close_line;
        prog.functions.push_back(std::move(fn));
        continue;
      }
      if (eat_kw("let")) {
        GlobalDecl g;
        g.line = decl_line;
        g.doc = doc;
        g.name = expect_ident();
        if (failed) return err;
        if (!expect_punct(":")) return err;
        auto t = parse_type();
        if (!t) return err;
        g.type = *t;
        if (!expect_punct("=")) return err;
        g.init = parse_expr();
        if (!g.init) return err;
        if (!expect_punct(";")) return err;
        prog.globals.push_back(std::move(g));
        continue;
      }
      fail("expected 'fn' or 'let' at top level, found '" + cur().text + "'");
      return err;
    }
    return prog;
  }
};

}  // namespace

const char* type_name(Type t) {
  switch (t) {
    case Type::Int: return "int";
    case Type::Bool: return "bool";
    case Type::String: return "string";
    case Type::IntArray: return "[int]";
    case Type::Void: return "void";
  }
  return "?";
}

const FunctionDecl* Program::find_function(const std::string& name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

ParseResult parse_program(const std::string& source_text,
                          const std::string& source_path) {
  auto lr = lex(source_text);
  if (!lr.ok) return ParseError{lr.error.line, lr.error.col, lr.error.message};
  Parser p{lr.tokens};
  for (auto& [line, doc] : lr.doc_comments) p.docs[line] = doc;
  return p.parse(source_path);
}

}  // namespace hits::minilang
