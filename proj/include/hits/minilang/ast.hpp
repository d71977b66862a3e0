#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hits::minilang {

enum class Type { Int, Bool, String, IntArray, Void };

const char* type_name(Type t);

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

/// Expression node. `line` is the 1-based source line of the first token.
struct Expr {
  enum class Kind {
    IntLit,
    BoolLit,
    StringLit,
    ArrayLit,
    Var,
    Unary,    // op in `name`: "-" or "!"
    Binary,   // op in `name`: + - * / % < <= > >= == != && ||
    Call,     // callee in `name`
    Index,    // args[0] = base, args[1] = index
    Len,      // args[0]
    Str,      // args[0]
  };

  Kind kind;
  int line = 0;
  long long int_val = 0;
  bool bool_val = false;
  std::string str_val;        // string literal payload
  std::string name;           // variable / callee / operator
  std::vector<ExprPtr> args;  // operands, call args, array elements
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Block {
  std::vector<StmtPtr> stmts;
  int open_line = 0;   // line of `{`
  int close_line = 0;  // line of `}`
};

/// Statement node. One statement per source line; `line` is the statement's
/// own line, `end_line` the closing-brace line for compound statements.
struct Stmt {
  enum class Kind {
    Let,          // name, opt decl_type, value
    Assign,       // name, value
    IndexAssign,  // name, target_index, value
    If,           // cond, body, else branch optional
    While,        // cond, body
    For,          // loop_var, range_from, range_to, body
    Return,       // value optional
    ExprCall,     // value holds the call expression
    Assert,       // cond
    Print,        // value
  };

  Kind kind;
  int line = 0;
  int end_line = 0;

  std::string name;
  std::optional<Type> decl_type;
  ExprPtr target_index;
  ExprPtr value;
  ExprPtr cond;
  Block body;
  Block else_body;
  bool has_else = false;
  std::string loop_var;
  ExprPtr range_from;
  ExprPtr range_to;
};

struct Param {
  std::string name;
  Type type;
};

struct FunctionDecl {
  std::string name;
  std::vector<Param> params;
  Type return_type = Type::Void;
  Block body;
  std::optional<std::string> doc;
  int first_line = 0;  // line of `fn`
  int last_line = 0;   // line of closing `}`
};

struct GlobalDecl {
  std::string name;
  Type type;
  ExprPtr init;
  std::optional<std::string> doc;
  int line = 0;
};

struct Program {
  std::vector<FunctionDecl> functions;
  std::vector<GlobalDecl> globals;
  std::string source_path;

  const FunctionDecl* find_function(const std::string& name) const;
};

}  // namespace hits::minilang
