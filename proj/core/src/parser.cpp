// Copyright 2026 The Chaoscope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chaoscope/error.hpp"
#include "chaoscope/sysdsl.hpp"
#include "lexer.hpp"

namespace chaoscope {

namespace {

using detail::Tok;
using detail::Token;

// Unresolved expression: identifiers are kept by name until every equation
// of the system has been seen.
struct Raw {
  enum class Kind { kNumber, kName, kNeg, kBinary, kCall };
  Kind kind;
  double number = 0.0;
  std::string name;
  bool with_t = false;  // written as name(t)
  BinaryOp op = BinaryOp::kAdd;
  std::vector<std::unique_ptr<Raw>> kids;
  std::size_t line = 0;
  std::size_t column = 0;
};
using RawPtr = std::unique_ptr<Raw>;

RawPtr raw(Raw::Kind kind, const Token& at) {
  auto r = std::make_unique<Raw>();
  r->kind = kind;
  r->line = at.line;
  r->column = at.column;
  return r;
}

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    next();
    return true;
  }
  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(peek(), std::string("expected ") + what +
                                             ", found " + detail::describe(peek()));
    return next();
  }
  bool accept_word(std::string_view word) {
    if (peek().kind == Tok::kIdent && peek().text == word) {
      next();
      return true;
    }
    return false;
  }
  [[noreturn]] static void fail(const Token& at, const std::string& msg) {
    throw SyntaxError(at.line, at.column, msg);
  }

  std::size_t mark() const { return pos_; }
  void reset(std::size_t m) { pos_ = m; }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---- arithmetic grammar shared by systems and predicates ----

RawPtr parse_sum(TokenStream& ts);

RawPtr parse_primary(TokenStream& ts) {
  const Token& tok = ts.peek();
  if (tok.kind == Tok::kNumber) {
    ts.next();
    auto r = raw(Raw::Kind::kNumber, tok);
    r->number = tok.number;
    return r;
  }
  if (tok.kind == Tok::kLParen) {
    ts.next();
    auto inner = parse_sum(ts);
    ts.expect(Tok::kRParen, "')'");
    return inner;
  }
  if (tok.kind == Tok::kIdent) {
    const Token name = ts.next();
    if (ts.peek().kind == Tok::kLParen) {
      // name(t) is a state variable written in function form; anything else is a call.
      if (ts.peek(1).kind == Tok::kIdent && ts.peek(1).text == "t" &&
          ts.peek(2).kind == Tok::kRParen && !function_from_name(name.text)) {
        ts.next();
        ts.next();
        ts.next();
        auto r = raw(Raw::Kind::kName, name);
        r->name = name.text;
        r->with_t = true;
        return r;
      }
      ts.next();
      auto r = raw(Raw::Kind::kCall, name);
      r->name = name.text;
      if (ts.peek().kind != Tok::kRParen) {
        r->kids.push_back(parse_sum(ts));
        while (ts.accept(Tok::kComma)) r->kids.push_back(parse_sum(ts));
      }
      ts.expect(Tok::kRParen, "')'");
      return r;
    }
    auto r = raw(Raw::Kind::kName, name);
    r->name = name.text;
    return r;
  }
  TokenStream::fail(tok, "expected expression, found " + detail::describe(tok));
}

RawPtr parse_unary(TokenStream& ts);

RawPtr parse_power(TokenStream& ts) {
  auto base = parse_primary(ts);
  if (ts.peek().kind == Tok::kCaret) {
    const Token op = ts.next();
    auto r = raw(Raw::Kind::kBinary, op);
    r->op = BinaryOp::kPow;
    r->kids.push_back(std::move(base));
    r->kids.push_back(parse_unary(ts));  // right-associative
    return r;
  }
  return base;
}

RawPtr parse_unary(TokenStream& ts) {
  if (ts.peek().kind == Tok::kMinus) {
    const Token op = ts.next();
    auto r = raw(Raw::Kind::kNeg, op);
    r->kids.push_back(parse_unary(ts));
    return r;
  }
  if (ts.accept(Tok::kPlus)) return parse_unary(ts);
  return parse_power(ts);
}

RawPtr parse_product(TokenStream& ts) {
  auto lhs = parse_unary(ts);
  while (ts.peek().kind == Tok::kStar || ts.peek().kind == Tok::kSlash) {
    const Token op = ts.next();
    auto r = raw(Raw::Kind::kBinary, op);
    r->op = op.kind == Tok::kStar ? BinaryOp::kMul : BinaryOp::kDiv;
    r->kids.push_back(std::move(lhs));
    r->kids.push_back(parse_unary(ts));
    lhs = std::move(r);
  }
  return lhs;
}

RawPtr parse_sum(TokenStream& ts) {
  auto lhs = parse_product(ts);
  while (ts.peek().kind == Tok::kPlus || ts.peek().kind == Tok::kMinus) {
    const Token op = ts.next();
    auto r = raw(Raw::Kind::kBinary, op);
    r->op = op.kind == Tok::kPlus ? BinaryOp::kAdd : BinaryOp::kSub;
    r->kids.push_back(std::move(lhs));
    r->kids.push_back(parse_product(ts));
    lhs = std::move(r);
  }
  return lhs;
}

// ---- resolution ----

enum class Context { kEquation, kParameter, kPredicate };

struct Scope {
  const std::vector<std::string>* state_vars = nullptr;
  const std::map<std::string, double>* parameters = nullptr;
  Context context = Context::kEquation;
};

[[noreturn]] void unknown_name(const Raw& r, const Scope& scope) {
  const std::string where = " at " + std::to_string(r.line) + ":" + std::to_string(r.column);
  switch (scope.context) {
    case Context::kEquation:
      throw Error(Errc::kMissingEquation,
                  "missing equation for '" + r.name +
                      "': not a state variable with an equation and not a parameter" + where);
    case Context::kParameter:
      throw Error(Errc::kUndeclaredIdentifier,
                  "undeclared identifier '" + r.name +
                      "' (parameter values may use only earlier parameters)" + where);
    case Context::kPredicate:
      throw Error(Errc::kUndeclaredIdentifier,
                  "unknown identifier '" + r.name + "'" + where);
  }
  throw Error(Errc::kUndeclaredIdentifier, "unknown identifier '" + r.name + "'");
}

ExprPtr resolve(const Raw& r, const Scope& scope) {
  switch (r.kind) {
    case Raw::Kind::kNumber:
      return make_constant(r.number);
    case Raw::Kind::kName: {
      if (r.name == "t" && !r.with_t) {
        if (scope.context != Context::kEquation) {
          throw Error(Errc::kUndeclaredIdentifier,
                      "time 't' is not allowed here (" + std::to_string(r.line) + ":" +
                          std::to_string(r.column) + ")");
        }
        return make_time();
      }
      if (scope.state_vars) {
        for (std::size_t i = 0; i < scope.state_vars->size(); ++i) {
          if ((*scope.state_vars)[i] == r.name) return make_state(i);
        }
      }
      if (!r.with_t && scope.parameters && scope.parameters->count(r.name)) {
        return make_param(r.name);
      }
      unknown_name(r, scope);
    }
    case Raw::Kind::kNeg:
      return make_negate(resolve(*r.kids[0], scope));
    case Raw::Kind::kBinary: {
      auto lhs = resolve(*r.kids[0], scope);
      auto rhs = resolve(*r.kids[1], scope);
      if (r.op == BinaryOp::kPow && depends_on_state_or_time(*rhs)) {
        throw SyntaxError(r.line, r.column,
                          "exponent of '^' must be constant (numbers and parameters only)");
      }
      return make_binary(r.op, std::move(lhs), std::move(rhs));
    }
    case Raw::Kind::kCall: {
      auto fn = function_from_name(r.name);
      if (!fn) {
        throw Error(Errc::kUndeclaredIdentifier,
                    "undeclared function '" + r.name + "' at " + std::to_string(r.line) +
                        ":" + std::to_string(r.column));
      }
      if (r.kids.size() != 1) {
        throw SyntaxError(r.line, r.column,
                          "function '" + r.name + "' takes 1 argument, got " +
                              std::to_string(r.kids.size()));
      }
      std::vector<ExprPtr> args;
      args.push_back(resolve(*r.kids[0], scope));
      return make_call(*fn, std::move(args));
    }
  }
  throw Error(Errc::kSyntax, "unreachable expression kind");
}

bool is_reserved(std::string_view name) {
  return name == "t" || name == "diff" || name == "param" || name == "and" ||
         name == "or" || name == "not" || function_from_name(name).has_value();
}

void skip_separators(TokenStream& ts) {
  while (ts.accept(Tok::kSeparator)) {
  }
}

void end_statement(TokenStream& ts) {
  const Token& tok = ts.peek();
  if (tok.kind != Tok::kSeparator && tok.kind != Tok::kEnd) {
    TokenStream::fail(tok, "expected end of statement, found " + detail::describe(tok));
  }
}

}  // namespace

SystemDef parse_system(std::string_view source, std::string name) {
  TokenStream ts(detail::tokenize(source));

  struct PendingEquation {
    Token var;
    RawPtr rhs;
  };
  std::vector<PendingEquation> equations;
  std::map<std::string, double> params;
  std::vector<Token> param_tokens;

  skip_separators(ts);
  if (ts.peek().kind == Tok::kEnd) {
    throw SyntaxError(ts.peek().line, ts.peek().column, "empty system: no equations");
  }
  while (ts.peek().kind != Tok::kEnd) {
    const Token& head = ts.peek();
    if (head.kind == Tok::kIdent && head.text == "param") {
      ts.next();
      const Token id = ts.expect(Tok::kIdent, "parameter name");
      if (is_reserved(id.text)) TokenStream::fail(id, "'" + id.text + "' is reserved");
      ts.expect(Tok::kEquals, "'='");
      auto value_raw = parse_sum(ts);
      end_statement(ts);
      Scope scope{nullptr, &params, Context::kParameter};
      const SystemDef empty("params", {"_"}, params, {make_constant(0.0)});
      const double value = eval_expr(*resolve(*value_raw, scope), empty, 0.0,
                                     std::vector<double>{0.0});
      if (params.count(id.text)) {
        TokenStream::fail(id, "parameter '" + id.text + "' declared twice");
      }
      params[id.text] = value;
      param_tokens.push_back(id);
    } else if (head.kind == Tok::kIdent && head.text == "diff") {
      ts.next();
      ts.expect(Tok::kLParen, "'(' after diff");
      const Token var = ts.expect(Tok::kIdent, "state variable name");
      if (is_reserved(var.text)) TokenStream::fail(var, "'" + var.text + "' is reserved");
      if (ts.accept(Tok::kLParen)) {
        const Token& t = ts.expect(Tok::kIdent, "'t'");
        if (t.text != "t") TokenStream::fail(t, "expected 't'");
        ts.expect(Tok::kRParen, "')'");
      }
      ts.expect(Tok::kComma, "','");
      const Token& t = ts.expect(Tok::kIdent, "'t'");
      if (t.text != "t") TokenStream::fail(t, "derivatives must be taken with respect to 't'");
      ts.expect(Tok::kRParen, "')'");
      ts.expect(Tok::kEquals, "'='");
      auto rhs = parse_sum(ts);
      end_statement(ts);
      for (const auto& eq : equations) {
        if (eq.var.text == var.text) {
          throw Error(Errc::kDuplicateEquation,
                      "duplicate equation for '" + var.text + "' at " +
                          std::to_string(var.line) + ":" + std::to_string(var.column));
        }
      }
      equations.push_back({var, std::move(rhs)});
    } else {
      TokenStream::fail(head, "expected 'diff(' or 'param', found " + detail::describe(head));
    }
    skip_separators(ts);
  }

  if (equations.empty()) {
    throw SyntaxError(1, 1, "system has no equations");
  }
  std::vector<std::string> vars;
  for (const auto& eq : equations) vars.push_back(eq.var.text);
  for (const auto& tok : param_tokens) {
    for (const auto& v : vars) {
      if (v == tok.text) {
        TokenStream::fail(tok, "parameter '" + tok.text + "' collides with a state variable");
      }
    }
  }
  Scope scope{&vars, &params, Context::kEquation};
  std::vector<ExprPtr> rhs;
  for (const auto& eq : equations) rhs.push_back(resolve(*eq.rhs, scope));
  return SystemDef(std::move(name), std::move(vars), std::move(params), std::move(rhs));
}

namespace {

std::optional<Comparison> comparison_of(Tok kind) {
  switch (kind) {
    case Tok::kLess: return Comparison::kLess;
    case Tok::kGreater: return Comparison::kGreater;
    case Tok::kLessEqual: return Comparison::kLessEqual;
    case Tok::kGreaterEqual: return Comparison::kGreaterEqual;
    default: return std::nullopt;
  }
}

struct PredicateParser {
  TokenStream& ts;
  Scope scope;

  PredPtr parse_or() {
    auto lhs = parse_and();
    while (ts.accept_word("or")) {
      auto n = std::make_shared<PredNode>();
      n->kind = PredNode::Kind::kOr;
      n->left = std::move(lhs);
      n->right = parse_and();
      lhs = std::move(n);
    }
    return lhs;
  }

  PredPtr parse_and() {
    auto lhs = parse_unary();
    while (ts.accept_word("and")) {
      auto n = std::make_shared<PredNode>();
      n->kind = PredNode::Kind::kAnd;
      n->left = std::move(lhs);
      n->right = parse_unary();
      lhs = std::move(n);
    }
    return lhs;
  }

  PredPtr parse_unary() {
    if (ts.accept_word("not")) {
      auto n = std::make_shared<PredNode>();
      n->kind = PredNode::Kind::kNot;
      n->left = parse_unary();
      return n;
    }
    if (ts.peek().kind == Tok::kLParen) {
      // Either a parenthesized predicate or the start of an arithmetic
      // operand such as (x+1) < 2; try the former first.
      const auto m = ts.mark();
      try {
        ts.next();
        auto inner = parse_or();
        ts.expect(Tok::kRParen, "')'");
        if (!comparison_of(ts.peek().kind)) return inner;
      } catch (const SyntaxError&) {
      }
      ts.reset(m);
    }
    return parse_comparison();
  }

  PredPtr parse_comparison() {
    auto lhs = parse_sum(ts);
    const Token& op = ts.peek();
    auto cmp = comparison_of(op.kind);
    if (!cmp) {
      TokenStream::fail(op, "expected comparison (<, >, <=, >=), found " + detail::describe(op));
    }
    ts.next();
    auto rhs = parse_sum(ts);
    auto n = std::make_shared<PredNode>();
    n->kind = PredNode::Kind::kCompare;
    n->cmp = *cmp;
    n->lhs = resolve(*lhs, scope);
    n->rhs = resolve(*rhs, scope);
    return n;
  }
};

}  // namespace

Predicate parse_predicate(std::string_view source, const SystemDef& sys) {
  auto toks = detail::tokenize(source);
  // A predicate is a single logical line; newlines are whitespace.
  std::vector<Token> filtered;
  for (auto& tok : toks) {
    if (tok.kind == Tok::kSeparator && tok.text == "\\n") continue;
    filtered.push_back(std::move(tok));
  }
  TokenStream ts(std::move(filtered));
  if (ts.peek().kind == Tok::kEnd) {
    TokenStream::fail(ts.peek(), "empty predicate");
  }
  PredicateParser parser{ts, Scope{&sys.state_vars(), &sys.parameters(), Context::kPredicate}};
  auto root = parser.parse_or();
  if (ts.peek().kind != Tok::kEnd) {
    TokenStream::fail(ts.peek(), "unexpected " + detail::describe(ts.peek()) + " after predicate");
  }
  return Predicate(std::move(root), std::string(source));
}

}  // namespace chaoscope
