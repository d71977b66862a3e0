#include "hits/minilang/check.hpp"

#include <map>

namespace hits::minilang {

namespace {

struct Checker {
  std::map<std::string, const FunctionDecl*> functions;
  std::map<std::string, Type> globals;
  std::optional<CheckError> error;

  void fail(int line, const std::string& msg) {
    if (!error) error = CheckError{line, msg};
  }

  struct Scope {
    std::vector<std::map<std::string, Type>> frames;
    void push() { frames.emplace_back(); }
    void pop() { frames.pop_back(); }
    bool declare(const std::string& name, Type t) {
      return frames.back().emplace(name, t).second;
    }
    std::optional<Type> lookup(const std::string& name) const {
      for (auto it = frames.rbegin(); it != frames.rend(); ++it) {
        auto f = it->find(name);
        if (f != it->end()) return f->second;
      }
      return std::nullopt;
    }
  };

  std::optional<Type> expr_type(const Expr& e, Scope& scope) {
    if (error) return std::nullopt;
    switch (e.kind) {
      case Expr::Kind::IntLit: return Type::Int;
      case Expr::Kind::BoolLit: return Type::Bool;
      case Expr::Kind::StringLit: return Type::String;
      case Expr::Kind::ArrayLit:
        for (const auto& a : e.args) {
          auto t = expr_type(*a, scope);
          if (!t) return std::nullopt;
          if (*t != Type::Int) {
            fail(a->line, "array elements must be int");
            return std::nullopt;
          }
        }
        return Type::IntArray;
      case Expr::Kind::Var: {
        if (auto t = scope.lookup(e.name)) return *t;
        auto g = globals.find(e.name);
        if (g != globals.end()) return g->second;
        fail(e.line, "undeclared variable '" + e.name + "'");
        return std::nullopt;
      }
      case Expr::Kind::Unary: {
        auto t = expr_type(*e.args[0], scope);
        if (!t) return std::nullopt;
        if (e.name == "-") {
          if (*t != Type::Int) fail(e.line, "unary '-' needs an int operand");
          return Type::Int;
        }
        if (*t != Type::Bool) fail(e.line, "'!' needs a bool operand");
        return Type::Bool;
      }
      case Expr::Kind::Binary: {
        auto lt = expr_type(*e.args[0], scope);
        auto rt = expr_type(*e.args[1], scope);
        if (!lt || !rt) return std::nullopt;
        const std::string& op = e.name;
        if (op == "&&" || op == "||") {
          if (*lt != Type::Bool || *rt != Type::Bool)
            fail(e.line, "'" + op + "' needs bool operands");
          return Type::Bool;
        }
        if (op == "==" || op == "!=") {
          if (*lt != *rt || *lt == Type::IntArray)
            fail(e.line, "'" + op + "' needs matching int/bool/string operands");
          return Type::Bool;
        }
        if (op == "<" || op == "<=" || op == ">" || op == ">=") {
          if (*lt != Type::Int || *rt != Type::Int)
            fail(e.line, "'" + op + "' needs int operands");
          return Type::Bool;
        }
        if (op == "+") {
          if (*lt == Type::String && *rt == Type::String) return Type::String;
          if (*lt == Type::Int && *rt == Type::Int) return Type::Int;
          fail(e.line, "'+' needs two ints or two strings");
          return std::nullopt;
        }
        if (*lt != Type::Int || *rt != Type::Int)
          fail(e.line, "'" + op + "' needs int operands");
        return Type::Int;
      }
      case Expr::Kind::Call: {
        auto f = functions.find(e.name);
        if (f == functions.end()) {
          fail(e.line, "unresolved function '" + e.name + "'");
          return std::nullopt;
        }
        const FunctionDecl* fn = f->second;
        if (fn->params.size() != e.args.size()) {
          fail(e.line, "'" + e.name + "' expects " +
                           std::to_string(fn->params.size()) +
                           " argument(s), got " +
                           std::to_string(e.args.size()));
          return std::nullopt;
        }
        for (size_t i = 0; i < e.args.size(); ++i) {
          auto t = expr_type(*e.args[i], scope);
          if (!t) return std::nullopt;
          if (*t != fn->params[i].type) {
            fail(e.args[i]->line,
                 "argument " + std::to_string(i + 1) + " of '" + e.name +
                     "' must be " + type_name(fn->params[i].type));
            return std::nullopt;
          }
        }
        return fn->return_type;
      }
      case Expr::Kind::Index: {
        auto bt = expr_type(*e.args[0], scope);
        auto it = expr_type(*e.args[1], scope);
        if (!bt || !it) return std::nullopt;
        if (*bt != Type::IntArray) fail(e.line, "indexing needs an array");
        if (*it != Type::Int) fail(e.line, "array index must be int");
        return Type::Int;
      }
      case Expr::Kind::Len: {
        auto t = expr_type(*e.args[0], scope);
        if (!t) return std::nullopt;
        if (*t != Type::IntArray && *t != Type::String)
          fail(e.line, "len() needs an array or string");
        return Type::Int;
      }
      case Expr::Kind::Str: {
        auto t = expr_type(*e.args[0], scope);
        if (!t) return std::nullopt;
        if (*t != Type::Int && *t != Type::Bool)
          fail(e.line, "str() needs an int or bool");
        return Type::String;
      }
    }
    return std::nullopt;
  }

  void check_block(const Block& b, Scope& scope, const FunctionDecl& fn) {
    scope.push();
    for (const auto& sp : b.stmts) {
      if (error) break;
      const Stmt& s = *sp;
      switch (s.kind) {
        case Stmt::Kind::Let: {
          auto t = expr_type(*s.value, scope);
          if (!t) break;
          if (*t == Type::Void) {
            fail(s.line, "cannot bind a void call result");
            break;
          }
          if (s.decl_type && *s.decl_type != *t) {
            fail(s.line, "initializer type " + std::string(type_name(*t)) +
                             " does not match declared " +
                             type_name(*s.decl_type));
            break;
          }
          if (!scope.declare(s.name, s.decl_type ? *s.decl_type : *t))
            fail(s.line, "redeclaration of '" + s.name + "'");
          break;
        }
        case Stmt::Kind::Assign: {
          auto vt = expr_type(*s.value, scope);
          if (!vt) break;
          std::optional<Type> target = scope.lookup(s.name);
          if (!target) {
            auto g = globals.find(s.name);
            if (g != globals.end()) target = g->second;
          }
          if (!target) {
            fail(s.line, "assignment to undeclared variable '" + s.name + "'");
            break;
          }
          if (*target != *vt)
            fail(s.line, "cannot assign " + std::string(type_name(*vt)) +
                             " to " + type_name(*target) + " variable '" +
                             s.name + "'");
          break;
        }
        case Stmt::Kind::IndexAssign: {
          std::optional<Type> target = scope.lookup(s.name);
          if (!target) {
            auto g = globals.find(s.name);
            if (g != globals.end()) target = g->second;
          }
          if (!target) {
            fail(s.line, "assignment to undeclared variable '" + s.name + "'");
            break;
          }
          if (*target != Type::IntArray) {
            fail(s.line, "'" + s.name + "' is not an array");
            break;
          }
          auto it = expr_type(*s.target_index, scope);
          if (it && *it != Type::Int) fail(s.line, "array index must be int");
          auto vt = expr_type(*s.value, scope);
          if (vt && *vt != Type::Int)
            fail(s.line, "array elements must be int");
          break;
        }
        case Stmt::Kind::If:
        case Stmt::Kind::While: {
          auto t = expr_type(*s.cond, scope);
          if (t && *t != Type::Bool)
            fail(s.line, "condition must be bool");
          check_block(s.body, scope, fn);
          if (s.has_else) check_block(s.else_body, scope, fn);
          break;
        }
        case Stmt::Kind::For: {
          auto ft = expr_type(*s.range_from, scope);
          auto tt = expr_type(*s.range_to, scope);
          if (ft && *ft != Type::Int) fail(s.line, "range start must be int");
          if (tt && *tt != Type::Int) fail(s.line, "range end must be int");
          scope.push();
          scope.declare(s.loop_var, Type::Int);
          check_block(s.body, scope, fn);
          scope.pop();
          break;
        }
        case Stmt::Kind::Return: {
          if (!s.value) {
            if (fn.return_type != Type::Void)
              fail(s.line, "'" + fn.name + "' must return a value");
            break;
          }
          auto t = expr_type(*s.value, scope);
          if (!t) break;
          if (fn.return_type == Type::Void)
            fail(s.line, "'" + fn.name + "' returns no value");
          else if (*t != fn.return_type)
            fail(s.line, "return type " + std::string(type_name(*t)) +
                             " does not match declared " +
                             type_name(fn.return_type));
          break;
        }
        case Stmt::Kind::ExprCall:
          expr_type(*s.value, scope);
          break;
        case Stmt::Kind::Assert: {
          auto t = expr_type(*s.cond, scope);
          if (t && *t != Type::Bool) fail(s.line, "assert needs a bool");
          break;
        }
        case Stmt::Kind::Print: {
          auto t = expr_type(*s.value, scope);
          if (t && *t == Type::Void) fail(s.line, "cannot print a void value");
          break;
        }
      }
    }
    scope.pop();
  }
};

}  // namespace

std::optional<CheckError> check_units(
    const std::vector<const Program*>& units) {
  Checker c;
  for (const Program* p : units) {
    for (const auto& f : p->functions) {
      if (!c.functions.emplace(f.name, &f).second)
        return CheckError{f.first_line,
                          "duplicate function '" + f.name + "'"};
    }
    for (const auto& g : p->globals) {
      if (!c.globals.emplace(g.name, g.type).second)
        return CheckError{g.line, "duplicate global '" + g.name + "'"};
    }
  }
  // Global initializers: constant scope only (no locals, calls allowed).
  for (const Program* p : units) {
    for (const auto& g : p->globals) {
      Checker::Scope scope;
      scope.push();
      auto t = c.expr_type(*g.init, scope);
      if (c.error) return c.error;
      if (t && *t != g.type)
        return CheckError{g.line, "global initializer type mismatch"};
    }
  }
  for (const Program* p : units) {
    for (const auto& f : p->functions) {
      Checker::Scope scope;
      scope.push();
      std::map<std::string, bool> seen;
      for (const auto& prm : f.params) {
        if (seen.count(prm.name))
          return CheckError{f.first_line,
                            "duplicate parameter '" + prm.name + "'"};
        seen[prm.name] = true;
        scope.declare(prm.name, prm.type);
      }
      c.check_block(f.body, scope, f);
      if (c.error) return c.error;
    }
  }
  return std::nullopt;
}

}  // namespace hits::minilang
