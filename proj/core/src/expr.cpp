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

#include "chaoscope/expr.hpp"

#include <bit>
#include <cstdint>

namespace chaoscope {

std::string_view function_name(Function fn) {
  switch (fn) {
    case Function::kSin: return "sin";
    case Function::kCos: return "cos";
    case Function::kExp: return "exp";
    case Function::kLn: return "ln";
    case Function::kSqrt: return "sqrt";
    case Function::kAbs: return "abs";
  }
  return "?";
}

std::optional<Function> function_from_name(std::string_view name) {
  if (name == "sin") return Function::kSin;
  if (name == "cos") return Function::kCos;
  if (name == "exp") return Function::kExp;
  if (name == "ln") return Function::kLn;
  if (name == "sqrt") return Function::kSqrt;
  if (name == "abs") return Function::kAbs;
  return std::nullopt;
}

char binary_op_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::kAdd: return '+';
    case BinaryOp::kSub: return '-';
    case BinaryOp::kMul: return '*';
    case BinaryOp::kDiv: return '/';
    case BinaryOp::kPow: return '^';
  }
  return '?';
}

ExprPtr make_constant(double value) {
  return std::make_shared<const Expr>(Expr{node::Constant{value}});
}
ExprPtr make_state(std::size_t index) {
  return std::make_shared<const Expr>(Expr{node::StateRef{index}});
}
ExprPtr make_param(std::string name) {
  return std::make_shared<const Expr>(Expr{node::ParamRef{std::move(name)}});
}
ExprPtr make_time() { return std::make_shared<const Expr>(Expr{node::TimeRef{}}); }
ExprPtr make_negate(ExprPtr operand) {
  return std::make_shared<const Expr>(Expr{node::Negate{std::move(operand)}});
}
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<const Expr>(
      Expr{node::Binary{op, std::move(lhs), std::move(rhs)}});
}
ExprPtr make_call(Function fn, std::vector<ExprPtr> args) {
  return std::make_shared<const Expr>(Expr{node::Call{fn, std::move(args)}});
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.value.index() != b.value.index()) return false;
  if (auto* c = a.as<node::Constant>()) {
    return std::bit_cast<std::uint64_t>(c->value) ==
           std::bit_cast<std::uint64_t>(b.as<node::Constant>()->value);
  }
  if (auto* s = a.as<node::StateRef>()) return s->index == b.as<node::StateRef>()->index;
  if (auto* p = a.as<node::ParamRef>()) return p->name == b.as<node::ParamRef>()->name;
  if (a.as<node::TimeRef>()) return true;
  if (auto* n = a.as<node::Negate>()) {
    return structurally_equal(*n->operand, *b.as<node::Negate>()->operand);
  }
  if (auto* bin = a.as<node::Binary>()) {
    auto* other = b.as<node::Binary>();
    return bin->op == other->op && structurally_equal(*bin->lhs, *other->lhs) &&
           structurally_equal(*bin->rhs, *other->rhs);
  }
  auto* call = a.as<node::Call>();
  auto* other = b.as<node::Call>();
  if (call->fn != other->fn || call->args.size() != other->args.size()) return false;
  for (std::size_t i = 0; i < call->args.size(); ++i) {
    if (!structurally_equal(*call->args[i], *other->args[i])) return false;
  }
  return true;
}

bool depends_on_state_or_time(const Expr& e) {
  if (e.as<node::StateRef>() || e.as<node::TimeRef>()) return true;
  if (auto* n = e.as<node::Negate>()) return depends_on_state_or_time(*n->operand);
  if (auto* b = e.as<node::Binary>()) {
    return depends_on_state_or_time(*b->lhs) || depends_on_state_or_time(*b->rhs);
  }
  if (auto* c = e.as<node::Call>()) {
    for (const auto& arg : c->args) {
      if (depends_on_state_or_time(*arg)) return true;
    }
  }
  return false;
}

}  // namespace chaoscope
