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

#include "chaoscope/sysdsl.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cmath>
#include <set>

#include "chaoscope/error.hpp"

namespace chaoscope {

SystemDef::SystemDef(std::string name, std::vector<std::string> state_vars,
                     std::map<std::string, double> parameters,
                     std::vector<ExprPtr> rhs)
    : name_(std::move(name)),
      state_vars_(std::move(state_vars)),
      parameters_(std::move(parameters)),
      rhs_(std::move(rhs)) {
  if (state_vars_.empty()) {
    throw Error(Errc::kValidation, "system must have at least one state variable");
  }
  if (rhs_.size() != state_vars_.size()) {
    throw Error(Errc::kValidation, "system has " + std::to_string(state_vars_.size()) +
                                       " state variables but " +
                                       std::to_string(rhs_.size()) + " equations");
  }
  std::set<std::string> seen;
  for (const auto& v : state_vars_) {
    if (!seen.insert(v).second) {
      throw Error(Errc::kDuplicateEquation, "duplicate state variable '" + v + "'");
    }
    if (parameters_.count(v)) {
      throw Error(Errc::kValidation, "state variable '" + v + "' collides with a parameter");
    }
  }
}

std::size_t SystemDef::state_index(std::string_view var) const {
  for (std::size_t i = 0; i < state_vars_.size(); ++i) {
    if (state_vars_[i] == var) return i;
  }
  return state_vars_.size();
}

double SystemDef::parameter(std::string_view name) const {
  auto it = parameters_.find(std::string(name));
  if (it == parameters_.end()) {
    throw Error(Errc::kUndeclaredIdentifier, "unknown parameter '" + std::string(name) + "'");
  }
  return it->second;
}

SystemDef SystemDef::with_parameters(const std::map<std::string, double>& overrides) const {
  auto params = parameters_;
  for (const auto& [k, v] : overrides) {
    if (!params.count(k)) {
      throw Error(Errc::kUndeclaredIdentifier, "cannot rebind unknown parameter '" + k + "'");
    }
    params[k] = v;
  }
  return SystemDef(name_, state_vars_, std::move(params), rhs_);
}

SystemDef SystemDef::with_name(std::string name) const {
  return SystemDef(std::move(name), state_vars_, parameters_, rhs_);
}

bool structurally_equal(const SystemDef& a, const SystemDef& b) {
  if (a.state_vars() != b.state_vars()) return false;
  if (a.parameters().size() != b.parameters().size()) return false;
  for (const auto& [k, v] : a.parameters()) {
    auto it = b.parameters().find(k);
    if (it == b.parameters().end()) return false;
    if (std::bit_cast<std::uint64_t>(v) != std::bit_cast<std::uint64_t>(it->second)) return false;
  }
  for (std::size_t i = 0; i < a.rhs().size(); ++i) {
    if (!structurally_equal(*a.rhs()[i], *b.rhs()[i])) return false;
  }
  return true;
}

// ---- printing ----

namespace {

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

int precedence(const Expr& e) {
  if (auto* b = e.as<node::Binary>()) {
    switch (b->op) {
      case BinaryOp::kAdd:
      case BinaryOp::kSub: return 1;
      case BinaryOp::kMul:
      case BinaryOp::kDiv: return 2;
      case BinaryOp::kPow: return 4;
    }
  }
  if (e.as<node::Negate>()) return 3;
  return 5;
}

void print_into(const Expr& e, const SystemDef& sys, std::string& out) {
  if (auto* c = e.as<node::Constant>()) {
    out += format_number(c->value);
  } else if (auto* s = e.as<node::StateRef>()) {
    out += sys.state_vars().at(s->index);
  } else if (auto* p = e.as<node::ParamRef>()) {
    out += p->name;
  } else if (e.as<node::TimeRef>()) {
    out += 't';
  } else if (auto* n = e.as<node::Negate>()) {
    out += '-';
    const bool wrap = precedence(*n->operand) < 3;
    if (wrap) out += '(';
    print_into(*n->operand, sys, out);
    if (wrap) out += ')';
  } else if (auto* b = e.as<node::Binary>()) {
    const int prec = precedence(e);
    const int lp = precedence(*b->lhs);
    const int rp = precedence(*b->rhs);
    const bool pow = b->op == BinaryOp::kPow;
    // Left-associative ops need parens on an equal-precedence right child;
    // '^' is right-associative and its base must be a primary.
    const bool wrap_l = pow ? lp < 5 : lp < prec;
    const bool wrap_r = pow ? rp < 3 : rp <= prec;
    if (wrap_l) out += '(';
    print_into(*b->lhs, sys, out);
    if (wrap_l) out += ')';
    out += ' ';
    out += binary_op_symbol(b->op);
    out += ' ';
    if (wrap_r) out += '(';
    print_into(*b->rhs, sys, out);
    if (wrap_r) out += ')';
  } else if (auto* call = e.as<node::Call>()) {
    out += function_name(call->fn);
    out += '(';
    for (std::size_t i = 0; i < call->args.size(); ++i) {
      if (i) out += ", ";
      print_into(*call->args[i], sys, out);
    }
    out += ')';
  }
}

}  // namespace

std::string print_expr(const Expr& e, const SystemDef& sys) {
  std::string out;
  print_into(e, sys, out);
  return out;
}

std::string pretty_print(const SystemDef& sys) {
  std::string out;
  for (const auto& [name, value] : sys.parameters()) {
    out += "param " + name + " = " + format_number(value) + "\n";
  }
  for (std::size_t i = 0; i < sys.dimension(); ++i) {
    out += "diff(" + sys.state_vars()[i] + ",t) = " + print_expr(*sys.rhs()[i], sys) + "\n";
  }
  return out;
}

// ---- evaluation ----

namespace {

// Exponents that are integers of modest size are unrolled into repeated
// multiplication; the C emitter produces the same product chain.
constexpr double kMaxUnrolledExponent = 64.0;

bool unrollable(double exponent) {
  return std::isfinite(exponent) && exponent == std::floor(exponent) &&
         std::fabs(exponent) <= kMaxUnrolledExponent;
}

double power_unrolled(double base, long long n) {
  if (n == 0) return 1.0;
  const long long m = n < 0 ? -n : n;
  double r = base;
  for (long long i = 1; i < m; ++i) r = r * base;
  return n < 0 ? 1.0 / r : r;
}

struct TreeEval {
  const SystemDef& sys;
  double t;
  std::span<const double> x;

  double operator()(const Expr& e) const {
    if (auto* c = e.as<node::Constant>()) return c->value;
    if (auto* s = e.as<node::StateRef>()) return x[s->index];
    if (auto* p = e.as<node::ParamRef>()) return sys.parameter(p->name);
    if (e.as<node::TimeRef>()) return t;
    if (auto* n = e.as<node::Negate>()) return -(*this)(*n->operand);
    if (auto* b = e.as<node::Binary>()) {
      const double l = (*this)(*b->lhs);
      const double r = (*this)(*b->rhs);
      switch (b->op) {
        case BinaryOp::kAdd: return l + r;
        case BinaryOp::kSub: return l - r;
        case BinaryOp::kMul: return l * r;
        case BinaryOp::kDiv:
          if (r == 0.0) throw DomainError(0, "division by zero");
          return l / r;
        case BinaryOp::kPow:
          if (unrollable(r)) {
            if (r < 0 && l == 0.0) throw DomainError(0, "zero raised to a negative power");
            return power_unrolled(l, static_cast<long long>(r));
          }
          if (l < 0.0) throw DomainError(0, "negative base with non-integer exponent");
          if (l == 0.0 && r < 0.0) throw DomainError(0, "zero raised to a negative power");
          return std::pow(l, r);
      }
    }
    auto* call = e.as<node::Call>();
    const double a = (*this)(*call->args.at(0));
    switch (call->fn) {
      case Function::kSin: return std::sin(a);
      case Function::kCos: return std::cos(a);
      case Function::kExp: return std::exp(a);
      case Function::kLn:
        if (!(a > 0.0)) throw DomainError(0, "ln of non-positive value");
        return std::log(a);
      case Function::kSqrt:
        if (a < 0.0) throw DomainError(0, "sqrt of negative value");
        return std::sqrt(a);
      case Function::kAbs: return std::fabs(a);
    }
    return 0.0;
  }
};

}  // namespace

double eval_expr(const Expr& e, const SystemDef& sys, double t, std::span<const double> x) {
  return TreeEval{sys, t, x}(e);
}

std::vector<double> eval_rhs(const SystemDef& sys, double t, std::span<const double> x) {
  if (x.size() != sys.dimension()) {
    throw Error(Errc::kValidation, "state has length " + std::to_string(x.size()) +
                                       ", system dimension is " +
                                       std::to_string(sys.dimension()));
  }
  CompiledSystem compiled(sys);
  std::vector<double> out(sys.dimension());
  std::size_t bad = 0;
  if (!compiled.eval(t, x.data(), out.data(), &bad)) {
    // Re-run the tree walker on the failing component for a precise message.
    try {
      eval_expr(*sys.rhs()[bad], sys, t, x);
    } catch (const DomainError& e) {
      std::string msg = e.what();
      const auto colon = msg.find(": ");
      throw DomainError(bad, colon == std::string::npos ? msg : msg.substr(colon + 2));
    }
    throw DomainError(bad, "expression left its domain");
  }
  return out;
}

// ---- compiled programs ----

ExprProgram::ExprProgram(const Expr& e, const SystemDef& sys) { compile(e, sys, 0); }

void ExprProgram::compile(const Expr& e, const SystemDef& sys, std::size_t level) {
  depth_ = std::max(depth_, level + 1);
  if (auto* c = e.as<node::Constant>()) {
    code_.push_back({Op::kConst, 0, c->value});
  } else if (auto* s = e.as<node::StateRef>()) {
    code_.push_back({Op::kState, static_cast<long long>(s->index), 0.0});
  } else if (auto* p = e.as<node::ParamRef>()) {
    code_.push_back({Op::kConst, 0, sys.parameter(p->name)});
  } else if (e.as<node::TimeRef>()) {
    code_.push_back({Op::kTime, 0, 0.0});
  } else if (auto* n = e.as<node::Negate>()) {
    compile(*n->operand, sys, level);
    code_.push_back({Op::kNeg, 0, 0.0});
  } else if (auto* b = e.as<node::Binary>()) {
    compile(*b->lhs, sys, level);
    if (b->op == BinaryOp::kPow) {
      if (depends_on_state_or_time(*b->rhs)) {
        throw Error(Errc::kValidation, "exponent of '^' must be constant");
      }
      const double exponent = eval_expr(*b->rhs, sys, 0.0, {});
      if (unrollable(exponent)) {
        code_.push_back({Op::kPowInt, static_cast<long long>(exponent), 0.0});
      } else {
        code_.push_back({Op::kPowReal, 0, exponent});
      }
      return;
    }
    compile(*b->rhs, sys, level + 1);
    Op op = Op::kAdd;
    switch (b->op) {
      case BinaryOp::kAdd: op = Op::kAdd; break;
      case BinaryOp::kSub: op = Op::kSub; break;
      case BinaryOp::kMul: op = Op::kMul; break;
      case BinaryOp::kDiv: op = Op::kDiv; break;
      case BinaryOp::kPow: break;
    }
    code_.push_back({op, 0, 0.0});
  } else if (auto* call = e.as<node::Call>()) {
    compile(*call->args.at(0), sys, level);
    Op op = Op::kSin;
    switch (call->fn) {
      case Function::kSin: op = Op::kSin; break;
      case Function::kCos: op = Op::kCos; break;
      case Function::kExp: op = Op::kExp; break;
      case Function::kLn: op = Op::kLn; break;
      case Function::kSqrt: op = Op::kSqrt; break;
      case Function::kAbs: op = Op::kAbs; break;
    }
    code_.push_back({op, 0, 0.0});
  }
}

ExprProgram::Status ExprProgram::eval(double t, const double* x, double* stack,
                                      double* out) const {
  std::size_t sp = 0;
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::kConst: stack[sp++] = in.dval; break;
      case Op::kState: stack[sp++] = x[in.ival]; break;
      case Op::kTime: stack[sp++] = t; break;
      case Op::kNeg: stack[sp - 1] = -stack[sp - 1]; break;
      case Op::kAdd: --sp; stack[sp - 1] = stack[sp - 1] + stack[sp]; break;
      case Op::kSub: --sp; stack[sp - 1] = stack[sp - 1] - stack[sp]; break;
      case Op::kMul: --sp; stack[sp - 1] = stack[sp - 1] * stack[sp]; break;
      case Op::kDiv:
        --sp;
        if (stack[sp] == 0.0) return Status::kDomain;
        stack[sp - 1] = stack[sp - 1] / stack[sp];
        break;
      case Op::kPowInt:
        if (in.ival < 0 && stack[sp - 1] == 0.0) return Status::kDomain;
        stack[sp - 1] = power_unrolled(stack[sp - 1], in.ival);
        break;
      case Op::kPowReal: {
        const double base = stack[sp - 1];
        if (base < 0.0 || (base == 0.0 && in.dval < 0.0)) return Status::kDomain;
        stack[sp - 1] = std::pow(base, in.dval);
        break;
      }
      case Op::kSin: stack[sp - 1] = std::sin(stack[sp - 1]); break;
      case Op::kCos: stack[sp - 1] = std::cos(stack[sp - 1]); break;
      case Op::kExp: stack[sp - 1] = std::exp(stack[sp - 1]); break;
      case Op::kLn:
        if (!(stack[sp - 1] > 0.0)) return Status::kDomain;
        stack[sp - 1] = std::log(stack[sp - 1]);
        break;
      case Op::kSqrt:
        if (stack[sp - 1] < 0.0) return Status::kDomain;
        stack[sp - 1] = std::sqrt(stack[sp - 1]);
        break;
      case Op::kAbs: stack[sp - 1] = std::fabs(stack[sp - 1]); break;
    }
  }
  *out = stack[0];
  return Status::kOk;
}

CompiledSystem::CompiledSystem(const SystemDef& sys) {
  std::size_t depth = 1;
  programs_.reserve(sys.dimension());
  for (const auto& e : sys.rhs()) {
    programs_.emplace_back(*e, sys);
    depth = std::max(depth, programs_.back().stack_depth());
  }
  scratch_.assign(depth, 0.0);
}

bool CompiledSystem::eval(double t, const double* x, double* dxdt,
                          std::size_t* failed_component) const {
  for (std::size_t i = 0; i < programs_.size(); ++i) {
    if (programs_[i].eval(t, x, scratch_.data(), &dxdt[i]) != ExprProgram::Status::kOk) {
      if (failed_component) *failed_component = i;
      return false;
    }
  }
  return true;
}

// ---- predicates ----

Predicate Predicate::negated() const {
  auto n = std::make_shared<PredNode>();
  n->kind = PredNode::Kind::kNot;
  n->left = root_;
  return Predicate(std::move(n), "not (" + source_ + ")");
}

namespace {

bool eval_pred(const PredNode& p, const SystemDef& sys, std::span<const double> x) {
  switch (p.kind) {
    case PredNode::Kind::kAnd:
      return eval_pred(*p.left, sys, x) && eval_pred(*p.right, sys, x);
    case PredNode::Kind::kOr:
      return eval_pred(*p.left, sys, x) || eval_pred(*p.right, sys, x);
    case PredNode::Kind::kNot:
      return !eval_pred(*p.left, sys, x);
    case PredNode::Kind::kCompare: {
      const double l = eval_expr(*p.lhs, sys, 0.0, x);
      const double r = eval_expr(*p.rhs, sys, 0.0, x);
      switch (p.cmp) {
        case Comparison::kLess: return l < r;
        case Comparison::kGreater: return l > r;
        case Comparison::kLessEqual: return l <= r;
        case Comparison::kGreaterEqual: return l >= r;
      }
    }
  }
  return false;
}

}  // namespace

bool eval_predicate(const Predicate& p, const SystemDef& sys, std::span<const double> x) {
  if (x.size() != sys.dimension()) {
    throw Error(Errc::kValidation, "state has length " + std::to_string(x.size()) +
                                       ", system dimension is " +
                                       std::to_string(sys.dimension()));
  }
  return eval_pred(p.root(), sys, x);
}

}  // namespace chaoscope
