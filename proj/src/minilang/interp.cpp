#include "hits/minilang/interp.hpp"

#include <stdexcept>
#include <variant>

#include "hits/minilang/check.hpp"
#include "hits/minilang/parser.hpp"

namespace hits::minilang {

void RawCoverage::merge(const RawCoverage& other) {
  covered_lines.insert(other.covered_lines.begin(), other.covered_lines.end());
  for (const auto& [key, count] : other.branch_hits) branch_hits[key] += count;
}

namespace {

using Value = std::variant<long long, bool, std::string,
                           std::vector<long long>>;

std::string value_to_string(const Value& v) {
  if (std::holds_alternative<long long>(v))
    return std::to_string(std::get<long long>(v));
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
  if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
  const auto& arr = std::get<std::vector<long long>>(v);
  std::string out = "[";
  for (size_t i = 0; i < arr.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(arr[i]);
  }
  return out + "]";
}

struct RuntimeFault {
  int line;
  std::string message;
};

struct ReturnSignal {
  std::optional<Value> value;
};

struct Interp {
  const ExecutionLimits& limits;
  std::map<std::string, const FunctionDecl*> functions;
  std::map<std::string, const GlobalDecl*> global_decls;
  std::map<std::string, Value> globals;
  std::set<std::string> instrumented;  // functions of the program under test
  RawCoverage coverage;
  std::vector<TraceEvent>* trace = nullptr;
  std::string printed;
  long long steps = 0;
  int depth = 0;

  using Scope = std::vector<std::map<std::string, Value>>;

  void step(int line) {
    if (++steps > limits.max_steps)
      throw RuntimeFault{line, "step limit exceeded"};
  }

  void record_line(const FunctionDecl& fn, int line) {
    if (!instrumented.count(fn.name)) return;
    coverage.covered_lines.insert({fn.name, line});
    if (trace)
      trace->push_back({TraceEvent::Kind::Statement, fn.name, line, false});
  }

  void record_branch(const FunctionDecl& fn, int line, bool arm) {
    if (!instrumented.count(fn.name)) return;
    coverage.branch_hits[{fn.name, line, arm}] += 1;
    coverage.branch_hits.try_emplace({fn.name, line, !arm}, 0);
    if (trace)
      trace->push_back({TraceEvent::Kind::Branch, fn.name, line, arm});
  }

  Value* lookup(Scope& scope, const std::string& name) {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return &f->second;
    }
    auto g = globals.find(name);
    if (g != globals.end()) return &g->second;
    return nullptr;
  }

  Value eval(const Expr& e, Scope& scope) {
    switch (e.kind) {
      case Expr::Kind::IntLit: return e.int_val;
      case Expr::Kind::BoolLit: return e.bool_val;
      case Expr::Kind::StringLit: return e.str_val;
      case Expr::Kind::ArrayLit: {
        std::vector<long long> arr;
        arr.reserve(e.args.size());
        for (const auto& a : e.args)
          arr.push_back(std::get<long long>(eval(*a, scope)));
        return arr;
      }
      case Expr::Kind::Var: {
        Value* v = lookup(scope, e.name);
        if (!v) throw RuntimeFault{e.line, "unbound variable '" + e.name + "'"};
        return *v;
      }
      case Expr::Kind::Unary: {
        Value v = eval(*e.args[0], scope);
        if (e.name == "-") return -std::get<long long>(v);
        return !std::get<bool>(v);
      }
      case Expr::Kind::Binary: {
        const std::string& op = e.name;
        if (op == "&&") {
          if (!std::get<bool>(eval(*e.args[0], scope))) return false;
          return std::get<bool>(eval(*e.args[1], scope));
        }
        if (op == "||") {
          if (std::get<bool>(eval(*e.args[0], scope))) return true;
          return std::get<bool>(eval(*e.args[1], scope));
        }
        Value lv = eval(*e.args[0], scope);
        Value rv = eval(*e.args[1], scope);
        if (op == "==") return lv == rv;
        if (op == "!=") return lv != rv;
        if (op == "+") {
          if (std::holds_alternative<std::string>(lv))
            return std::get<std::string>(lv) + std::get<std::string>(rv);
          return std::get<long long>(lv) + std::get<long long>(rv);
        }
        long long l = std::get<long long>(lv);
        long long r = std::get<long long>(rv);
        if (op == "<") return l < r;
        if (op == "<=") return l <= r;
        if (op == ">") return l > r;
        if (op == ">=") return l >= r;
        if (op == "-") return l - r;
        if (op == "*") return l * r;
        if (op == "/") {
          if (r == 0) throw RuntimeFault{e.line, "division by zero"};
          return l / r;
        }
        if (r == 0) throw RuntimeFault{e.line, "modulo by zero"};
        return l % r;
      }
      case Expr::Kind::Call: {
        std::vector<Value> args;
        args.reserve(e.args.size());
        for (const auto& a : e.args) args.push_back(eval(*a, scope));
        return call(e.name, std::move(args), e.line);
      }
      case Expr::Kind::Index: {
        const auto arr = std::get<std::vector<long long>>(eval(*e.args[0], scope));
        long long idx = std::get<long long>(eval(*e.args[1], scope));
        if (idx < 0 || idx >= (long long)arr.size())
          throw RuntimeFault{e.line, "index " + std::to_string(idx) +
                                         " out of bounds for length " +
                                         std::to_string(arr.size())};
        return arr[size_t(idx)];
      }
      case Expr::Kind::Len: {
        Value v = eval(*e.args[0], scope);
        if (std::holds_alternative<std::string>(v))
          return (long long)std::get<std::string>(v).size();
        return (long long)std::get<std::vector<long long>>(v).size();
      }
      case Expr::Kind::Str: {
        Value v = eval(*e.args[0], scope);
        return value_to_string(v);
      }
    }
    throw RuntimeFault{e.line, "unreachable expression kind"};
  }

  bool eval_condition(const FunctionDecl& fn, const Expr& cond, int site_line,
                      Scope& scope) {
    step(site_line);
    bool result = std::get<bool>(eval(cond, scope));
    record_branch(fn, site_line, result);
    return result;
  }

  void exec_block(const FunctionDecl& fn, const Block& b, Scope& scope,
                  std::optional<ReturnSignal>& ret) {
    scope.emplace_back();
    for (const auto& sp : b.stmts) {
      exec_stmt(fn, *sp, scope, ret);
      if (ret) break;
    }
    scope.pop_back();
  }

  void exec_stmt(const FunctionDecl& fn, const Stmt& s, Scope& scope,
                 std::optional<ReturnSignal>& ret) {
    step(s.line);
    record_line(fn, s.line);
    switch (s.kind) {
      case Stmt::Kind::Let:
        scope.back()[s.name] = eval(*s.value, scope);
        break;
      case Stmt::Kind::Assign: {
        Value v = eval(*s.value, scope);
        Value* slot = lookup(scope, s.name);
        if (!slot)
          throw RuntimeFault{s.line, "unbound variable '" + s.name + "'"};
        *slot = std::move(v);
        break;
      }
      case Stmt::Kind::IndexAssign: {
        long long idx = std::get<long long>(eval(*s.target_index, scope));
        Value v = eval(*s.value, scope);
        Value* slot = lookup(scope, s.name);
        if (!slot)
          throw RuntimeFault{s.line, "unbound variable '" + s.name + "'"};
        auto& arr = std::get<std::vector<long long>>(*slot);
        if (idx < 0 || idx >= (long long)arr.size())
          throw RuntimeFault{s.line, "index " + std::to_string(idx) +
                                         " out of bounds for length " +
                                         std::to_string(arr.size())};
        arr[size_t(idx)] = std::get<long long>(v);
        break;
      }
      case Stmt::Kind::If:
        if (eval_condition(fn, *s.cond, s.line, scope))
          exec_block(fn, s.body, scope, ret);
        else if (s.has_else)
          exec_block(fn, s.else_body, scope, ret);
        break;
      case Stmt::Kind::While:
        while (eval_condition(fn, *s.cond, s.line, scope)) {
          exec_block(fn, s.body, scope, ret);
          if (ret) break;
        }
        break;
      case Stmt::Kind::For: {
        long long from = std::get<long long>(eval(*s.range_from, scope));
        long long to = std::get<long long>(eval(*s.range_to, scope));
        scope.emplace_back();
        for (long long i = from;; ++i) {
          // The implicit condition i < to is one branch site per evaluation.
          step(s.line);
          bool entered = i < to;
          record_branch(fn, s.line, entered);
          if (!entered) break;
          scope.back()[s.loop_var] = i;
          exec_block(fn, s.body, scope, ret);
          if (ret) break;
        }
        scope.pop_back();
        break;
      }
      case Stmt::Kind::Return:
        if (s.value)
          ret = ReturnSignal{eval(*s.value, scope)};
        else
          ret = ReturnSignal{std::nullopt};
        break;
      case Stmt::Kind::ExprCall:
        eval(*s.value, scope);
        break;
      case Stmt::Kind::Assert: {
        bool ok = std::get<bool>(eval(*s.cond, scope));
        if (!ok) throw RuntimeFault{s.line, "assertion failed"};
        break;
      }
      case Stmt::Kind::Print:
        printed += value_to_string(eval(*s.value, scope)) + "\n";
        break;
    }
  }

  Value call(const std::string& name, std::vector<Value> args, int call_line) {
    auto it = functions.find(name);
    if (it == functions.end())
      throw RuntimeFault{call_line, "unresolved function '" + name + "'"};
    const FunctionDecl& fn = *it->second;
    if (++depth > limits.max_call_depth) {
      --depth;
      throw RuntimeFault{call_line, "call depth limit exceeded"};
    }
    Scope scope;
    scope.emplace_back();
    for (size_t i = 0; i < fn.params.size(); ++i)
      scope.back()[fn.params[i].name] = std::move(args[i]);
    std::optional<ReturnSignal> ret;
    exec_block(fn, fn.body, scope, ret);
    --depth;
    if (ret && ret->value) return *ret->value;
    if (fn.return_type != Type::Void)
      throw RuntimeFault{fn.last_line,
                         "'" + fn.name + "' ended without returning a value"};
    return (long long)0;
  }

  void reset_globals(const std::vector<const Program*>& units) {
    globals.clear();
    Scope empty;
    empty.emplace_back();
    for (const Program* p : units)
      for (const auto& g : p->globals) globals[g.name] = eval(*g.init, empty);
  }
};

}  // namespace

ExecutionOutcome run_test(const Program& program,
                          const std::string& test_source,
                          const ExecutionLimits& limits,
                          std::vector<TraceEvent>* trace) {
  ExecutionOutcome outcome;
  auto parsed = parse_program(test_source, "<test>");
  if (auto* pe = std::get_if<ParseError>(&parsed)) {
    outcome.status = RunStatus::CompileError;
    outcome.message = "parse error: " + pe->message;
    outcome.failing_line = pe->line;
    return outcome;
  }
  const Program& test = std::get<Program>(parsed);
  std::vector<const Program*> units = {&program, &test};
  if (auto err = check_units(units)) {
    outcome.status = RunStatus::CompileError;
    outcome.message = "check error: " + err->message;
    outcome.failing_line = err->line;
    return outcome;
  }

  Interp interp{limits};
  interp.trace = trace;
  for (const Program* p : units)
    for (const auto& f : p->functions) interp.functions[f.name] = &f;
  for (const auto& f : program.functions) interp.instrumented.insert(f.name);

  for (const auto& f : test.functions) {
    if (f.name.rfind("test_", 0) != 0 || !f.params.empty()) continue;
    try {
      interp.reset_globals(units);
      interp.call(f.name, {}, f.first_line);
    } catch (const RuntimeFault& fault) {
      outcome.status = RunStatus::RuntimeError;
      outcome.message = fault.message + " (in " + f.name + ")";
      outcome.failing_line = fault.line;
      break;
    }
  }
  outcome.coverage = std::move(interp.coverage);
  outcome.printed = std::move(interp.printed);
  return outcome;
}

ErrorDistribution classify_outcomes(
    const std::vector<ExecutionOutcome>& outcomes) {
  ErrorDistribution dist;
  for (const auto& o : outcomes) {
    switch (o.status) {
      case RunStatus::Passed: ++dist.passed_count; break;
      case RunStatus::CompileError: ++dist.compile_count; break;
      case RunStatus::RuntimeError: ++dist.runtime_count; break;
    }
  }
  int failed = dist.compile_count + dist.runtime_count;
  if (failed > 0) {
    dist.compile_fraction = double(dist.compile_count) / failed;
    dist.runtime_fraction = double(dist.runtime_count) / failed;
  }
  return dist;
}

}  // namespace hits::minilang
