#include "hits/minilang/printer.hpp"

#include <sstream>

namespace hits::minilang {

namespace {

int op_prec(const std::string& op) {
  if (op == "||") return 1;
  if (op == "&&") return 2;
  if (op == "<" || op == "<=" || op == ">" || op == ">=" || op == "==" ||
      op == "!=")
    return 3;
  if (op == "+" || op == "-") return 4;
  return 5;  // * / %
}

std::string escape_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      default: out.push_back(c);
    }
  }
  out += '"';
  return out;
}

void print_expr_prec(const Expr& e, int parent_prec, std::string& out) {
  switch (e.kind) {
    case Expr::Kind::IntLit:
      out += std::to_string(e.int_val);
      break;
    case Expr::Kind::BoolLit:
      out += e.bool_val ? "true" : "false";
      break;
    case Expr::Kind::StringLit:
      out += escape_string(e.str_val);
      break;
    case Expr::Kind::ArrayLit:
      out += '[';
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        print_expr_prec(*e.args[i], 0, out);
      }
      out += ']';
      break;
    case Expr::Kind::Var:
      out += e.name;
      break;
    case Expr::Kind::Unary: {
      out += e.name;
      print_expr_prec(*e.args[0], 6, out);
      break;
    }
    case Expr::Kind::Binary: {
      int prec = op_prec(e.name);
      bool need = prec < parent_prec;
      if (need) out += '(';
      print_expr_prec(*e.args[0], prec, out);
      out += ' ';
      out += e.name;
      out += ' ';
      print_expr_prec(*e.args[1], prec + 1, out);
      if (need) out += ')';
      break;
    }
    case Expr::Kind::Call:
      out += e.name;
      out += '(';
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        print_expr_prec(*e.args[i], 0, out);
      }
      out += ')';
      break;
    case Expr::Kind::Index:
      print_expr_prec(*e.args[0], 7, out);
      out += '[';
      print_expr_prec(*e.args[1], 0, out);
      out += ']';
      break;
    case Expr::Kind::Len:
      out += "len(";
      print_expr_prec(*e.args[0], 0, out);
      out += ')';
      break;
    case Expr::Kind::Str:
      out += "str(";
      print_expr_prec(*e.args[0], 0, out);
      out += ')';
      break;
  }
}

void print_block(const Block& b, int indent, std::string& out);

void print_stmt(const Stmt& s, int indent, std::string& out) {
  std::string pad(indent * 4, ' ');
  out += pad;
  switch (s.kind) {
    case Stmt::Kind::Let:
      out += "let " + s.name;
      if (s.decl_type) out += std::string(": ") + type_name(*s.decl_type);
      out += " = ";
      print_expr_prec(*s.value, 0, out);
      out += ";\n";
      break;
    case Stmt::Kind::Assign:
      out += s.name + " = ";
      print_expr_prec(*s.value, 0, out);
      out += ";\n";
      break;
    case Stmt::Kind::IndexAssign:
      out += s.name + "[";
      print_expr_prec(*s.target_index, 0, out);
      out += "] = ";
      print_expr_prec(*s.value, 0, out);
      out += ";\n";
      break;
    case Stmt::Kind::If:
      out += "if (";
      print_expr_prec(*s.cond, 0, out);
      out += ") {\n";
      print_block(s.body, indent + 1, out);
      if (s.has_else) {
        out += pad + "} else {\n";
        print_block(s.else_body, indent + 1, out);
      }
      out += pad + "}\n";
      break;
    case Stmt::Kind::While:
      out += "while (";
      print_expr_prec(*s.cond, 0, out);
      out += ") {\n";
      print_block(s.body, indent + 1, out);
      out += pad + "}\n";
      break;
    case Stmt::Kind::For:
      out += "for (" + s.loop_var + " in ";
      print_expr_prec(*s.range_from, 0, out);
      out += " .. ";
      print_expr_prec(*s.range_to, 0, out);
      out += ") {\n";
      print_block(s.body, indent + 1, out);
      out += pad + "}\n";
      break;
    case Stmt::Kind::Return:
      out += "return";
      if (s.value) {
        out += ' ';
        print_expr_prec(*s.value, 0, out);
      }
      out += ";\n";
      break;
    case Stmt::Kind::ExprCall:
      print_expr_prec(*s.value, 0, out);
      out += ";\n";
      break;
    case Stmt::Kind::Assert:
      out += "assert(";
      print_expr_prec(*s.cond, 0, out);
      out += ");\n";
      break;
    case Stmt::Kind::Print:
      out += "print(";
      print_expr_prec(*s.value, 0, out);
      out += ");\n";
      break;
  }
}

void print_block(const Block& b, int indent, std::string& out) {
  for (const auto& s : b.stmts) print_stmt(*s, indent, out);
}

void print_doc(const std::optional<std::string>& doc, std::string& out) {
  if (!doc) return;
  std::istringstream in(*doc);
  std::string line;
  while (std::getline(in, line)) out += "/// " + line + "\n";
}

}  // namespace

std::string print_expr(const Expr& e) {
  std::string out;
  print_expr_prec(e, 0, out);
  return out;
}

std::string print_global(const GlobalDecl& g) {
  std::string out;
  print_doc(g.doc, out);
  out += "let " + g.name + ": " + type_name(g.type) + " = ";
  print_expr_prec(*g.init, 0, out);
  out += ";\n";
  return out;
}

std::string print_function(const FunctionDecl& fn) {
  std::string out;
  print_doc(fn.doc, out);
  out += "fn " + fn.name + "(";
  for (size_t i = 0; i < fn.params.size(); ++i) {
    if (i) out += ", ";
    out += fn.params[i].name + ": " + std::string(type_name(fn.params[i].type));
  }
  out += ")";
  if (fn.return_type != Type::Void)
    out += std::string(" -> ") + type_name(fn.return_type);
  out += " {\n";
  print_block(fn.body, 1, out);
  out += "}\n";
  return out;
}

std::string print_program(const Program& program) {
  std::string out;
  bool first = true;
  for (const auto& g : program.globals) {
    if (!first) out += "\n";
    out += print_global(g);
    first = false;
  }
  for (const auto& f : program.functions) {
    if (!first) out += "\n";
    out += print_function(f);
    first = false;
  }
  return out;
}

}  // namespace hits::minilang
