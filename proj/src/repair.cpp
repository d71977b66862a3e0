#include "hits/repair.hpp"

#include <map>
#include <set>

#include "hits/minilang/analysis.hpp"
#include "hits/minilang/parser.hpp"

namespace hits {

namespace {

char closer_for(char opener) {
  switch (opener) {
    case '(': return ')';
    case '{': return '}';
    case '[': return ']';
  }
  return 0;
}

bool is_closer(char c) { return c == ')' || c == '}' || c == ']'; }

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  lines.push_back(cur);
  return lines;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (size_t i = 0; i < lines.size(); ++i) {
    out += lines[i];
    if (i + 1 < lines.size()) out += '\n';
  }
  return out;
}

}  // namespace

std::string balance_brackets(const std::string& source) {
  std::vector<char> stack;
  std::set<size_t> drop;  // positions of unmatched closers
  bool in_comment_at_end = false;
  for (size_t i = 0; i < source.size(); ++i) {
    char c = source[i];
    if (c == '/' && i + 1 < source.size() && source[i + 1] == '/') {
      while (i < source.size() && source[i] != '\n') ++i;
      in_comment_at_end = i >= source.size();
      if (i >= source.size()) break;
      continue;
    }
    if (c == '"') {
      ++i;
      while (i < source.size() && source[i] != '"' && source[i] != '\n') {
        if (source[i] == '\\') ++i;
        ++i;
      }
      continue;
    }
    if (c == '(' || c == '{' || c == '[') {
      stack.push_back(c);
      continue;
    }
    if (is_closer(c)) {
      if (!stack.empty() && closer_for(stack.back()) == c)
        stack.pop_back();
      else
        drop.insert(i);
    }
  }
  if (stack.empty() && drop.empty()) return source;

  std::string out;
  out.reserve(source.size() + stack.size());
  for (size_t i = 0; i < source.size(); ++i)
    if (!drop.count(i)) out.push_back(source[i]);
  if (!stack.empty()) {
    if (in_comment_at_end || (!out.empty() && out.back() != '\n'))
      out += '\n';
    for (auto it = stack.rbegin(); it != stack.rend(); ++it)
      out.push_back(closer_for(*it));
    out += '\n';
  }
  return out;
}

std::string strip_assertions(const std::string& source, bool* warned) {
  if (warned) *warned = false;
  auto parsed = minilang::parse_program(source, "<strip>");
  if (std::holds_alternative<minilang::ParseError>(parsed)) {
    if (warned) *warned = true;
    return source;
  }
  const auto& prog = std::get<minilang::Program>(parsed);

  // Lines carrying an assert whose condition is not the literal `true`.
  std::set<int> assert_lines;
  std::function<void(const minilang::Block&)> walk =
      [&](const minilang::Block& b) {
        for (const auto& s : b.stmts) {
          if (s->kind == minilang::Stmt::Kind::Assert) {
            bool is_true_literal =
                s->cond->kind == minilang::Expr::Kind::BoolLit &&
                s->cond->bool_val;
            if (!is_true_literal) assert_lines.insert(s->line);
          }
          walk(s->body);
          walk(s->else_body);
        }
      };
  for (const auto& f : prog.functions) walk(f.body);
  if (assert_lines.empty()) return source;

  auto lines = split_lines(source);
  int scratch = 0;
  for (int line_no : assert_lines) {
    if (line_no < 1 || line_no > (int)lines.size()) continue;
    std::string& line = lines[line_no - 1];
    size_t at = line.find("assert");
    if (at == std::string::npos) continue;
    size_t open = line.find('(', at);
    if (open == std::string::npos) continue;
    // Matching close paren, string-aware.
    int depth = 0;
    size_t close = std::string::npos;
    for (size_t i = open; i < line.size(); ++i) {
      char c = line[i];
      if (c == '"') {
        ++i;
        while (i < line.size() && line[i] != '"') {
          if (line[i] == '\\') ++i;
          ++i;
        }
        continue;
      }
      if (c == '(') ++depth;
      if (c == ')' && --depth == 0) {
        close = i;
        break;
      }
    }
    if (close == std::string::npos) continue;
    std::string inner = line.substr(open + 1, close - open - 1);
    line = line.substr(0, at) + "let __hits_check_" +
           std::to_string(scratch++) + " = " + inner + ";";
  }
  return join_lines(lines);
}

std::string inject_preamble(const std::string& source,
                            const Project& project) {
  auto parsed = minilang::parse_program(source, "<preamble>");
  if (std::holds_alternative<minilang::ParseError>(parsed)) return source;
  const auto& prog = std::get<minilang::Program>(parsed);

  std::set<std::string> defined;
  for (const auto& f : prog.functions) defined.insert(f.name);
  for (const auto& pf : project.files)
    for (const auto& f : pf.program.functions) defined.insert(f.name);

  // First call site per unresolved name, in source order.
  std::vector<std::pair<std::string, const minilang::Expr*>> missing;
  std::function<void(const minilang::Expr&)> scan_expr =
      [&](const minilang::Expr& e) {
        if (e.kind == minilang::Expr::Kind::Call && !defined.count(e.name)) {
          bool seen = false;
          for (const auto& [n, _] : missing)
            if (n == e.name) seen = true;
          if (!seen) missing.emplace_back(e.name, &e);
        }
        for (const auto& a : e.args) scan_expr(*a);
      };
  std::function<void(const minilang::Block&)> scan_block =
      [&](const minilang::Block& b) {
        for (const auto& s : b.stmts) {
          if (s->cond) scan_expr(*s->cond);
          if (s->value) scan_expr(*s->value);
          if (s->target_index) scan_expr(*s->target_index);
          if (s->range_from) scan_expr(*s->range_from);
          if (s->range_to) scan_expr(*s->range_to);
          scan_block(s->body);
          scan_block(s->else_body);
        }
      };
  for (const auto& f : prog.functions) scan_block(f.body);
  if (missing.empty()) return source;

  // Syntactic argument-type guess; int when uncertain.
  std::function<const char*(const minilang::Expr&)> guess =
      [&](const minilang::Expr& e) -> const char* {
    using K = minilang::Expr::Kind;
    switch (e.kind) {
      case K::BoolLit: return "bool";
      case K::StringLit: return "string";
      case K::ArrayLit: return "[int]";
      case K::Unary: return e.name == "!" ? "bool" : "int";
      case K::Binary: {
        const std::string& op = e.name;
        if (op == "&&" || op == "||" || op == "<" || op == "<=" ||
            op == ">" || op == ">=" || op == "==" || op == "!=")
          return "bool";
        if (op == "+" && guess(*e.args[0]) == std::string("string"))
          return "string";
        return "int";
      }
      case K::Str: return "string";
      default: return "int";
    }
  };

  std::string preamble;
  for (const auto& [name, call] : missing) {
    preamble += "fn " + name + "(";
    for (size_t i = 0; i < call->args.size(); ++i) {
      if (i) preamble += ", ";
      preamble += "a" + std::to_string(i) + ": " + guess(*call->args[i]);
    }
    preamble += ") -> int {\n    return 0;\n}\n\n";
  }
  return preamble + source;
}

SelfDebugOutcome self_debug_loop(TestCandidate candidate,
                                 const minilang::Program& program,
                                 const Project& project, Backend& gateway,
                                 const PromptAssets& assets,
                                 const std::string& context_prefix,
                                 const minilang::ExecutionLimits& limits,
                                 int max_rounds) {
  SelfDebugOutcome out;
  std::map<std::string, minilang::ExecutionOutcome> run_cache;

  auto run_cached =
      [&](const std::string& src) -> const minilang::ExecutionOutcome& {
    auto it = run_cache.find(src);
    if (it == run_cache.end())
      it = run_cache.emplace(src, run_test(program, src, limits)).first;
    return it->second;
  };

  for (int round = 1; round <= max_rounds; ++round) {
    FixAttempt attempt;
    attempt.candidate_id = candidate.id;
    attempt.round = round;
    candidate.fix_round = round;

    {
      const minilang::ExecutionOutcome& outcome = run_cached(candidate.source);
      out.last_outcome = outcome;
      attempt.trigger_status = outcome.status;
      attempt.trigger_message = outcome.message;
      if (outcome.status == minilang::RunStatus::Passed) {
        attempt.result = FixResult::NowPassing;
        out.attempts.push_back(std::move(attempt));
        candidate.state = CandidateState::Passed;
        out.candidate = std::move(candidate);
        return out;
      }

      // Rule fixes keyed to the failure class; the LLM is only consulted
      // when they do not resolve the round's failure.
      std::string src = candidate.source;
      if (outcome.status == minilang::RunStatus::CompileError) {
        std::string balanced = balance_brackets(src);
        if (balanced != src) {
          attempt.rule_fixes_applied.push_back("balance_brackets");
          src = std::move(balanced);
        }
        std::string with_preamble = inject_preamble(src, project);
        if (with_preamble != src) {
          attempt.rule_fixes_applied.push_back("inject_preamble");
          src = std::move(with_preamble);
        }
      } else if (outcome.message.rfind("assertion failed", 0) == 0) {
        std::string stripped = strip_assertions(src, nullptr);
        if (stripped != src) {
          attempt.rule_fixes_applied.push_back("strip_assertions");
          src = std::move(stripped);
        }
      }
      if (!attempt.rule_fixes_applied.empty()) {
        candidate.source = std::move(src);
        if (candidate.state == CandidateState::Fresh)
          candidate.state = CandidateState::RuleFixed;
        const minilang::ExecutionOutcome& fixed = run_cached(candidate.source);
        out.last_outcome = fixed;
        if (fixed.status == minilang::RunStatus::Passed) {
          attempt.result = FixResult::NowPassing;
          out.attempts.push_back(std::move(attempt));
          candidate.state = CandidateState::Passed;
          out.candidate = std::move(candidate);
          return out;
        }
      }
    }
    const minilang::ExecutionOutcome& outcome = out.last_outcome;

    auto bundle = render_fix(assets, context_prefix, candidate, outcome);
    auto result = complete_with_escalation(gateway, bundle, [](const std::string& raw) {
      return std::holds_alternative<Payload>(
          extract_payload(raw, PayloadKind::FixedTest));
    });
    attempt.llm_called = true;

    if (auto* err = std::get_if<GatewayError>(&result)) {
      attempt.result = FixResult::Abandoned;
      out.attempts.push_back(std::move(attempt));
      candidate.state = CandidateState::Abandoned;
      out.abandon_reason = "gateway: " + err->message;
      out.candidate = std::move(candidate);
      return out;
    }

    const std::string& raw = std::get<EscalationResult>(result).text;
    auto payload = std::get<Payload>(extract_payload(raw, PayloadKind::FixedTest));
    if (round == max_rounds) {
      attempt.result = FixResult::Abandoned;
      out.attempts.push_back(std::move(attempt));
      candidate.state = CandidateState::Abandoned;
      out.abandon_reason = "fix rounds exhausted";
      out.candidate = std::move(candidate);
      return out;
    }
    attempt.result = FixResult::StillFailing;
    out.attempts.push_back(std::move(attempt));
    candidate.source = payload.source;
    candidate.state = CandidateState::LlmFixed;
  }
  // max_rounds >= 1 always returns inside the loop.
  candidate.state = CandidateState::Abandoned;
  out.candidate = std::move(candidate);
  return out;
}

}  // namespace hits
