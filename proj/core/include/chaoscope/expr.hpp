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

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace chaoscope {

enum class BinaryOp { kAdd, kSub, kMul, kDiv, kPow };
enum class Function { kSin, kCos, kExp, kLn, kSqrt, kAbs };

std::string_view function_name(Function fn);
std::optional<Function> function_from_name(std::string_view name);
char binary_op_symbol(BinaryOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

namespace node {

struct Constant {
  double value;
};
struct StateRef {
  std::size_t index;
};
struct ParamRef {
  std::string name;
};
struct TimeRef {};
struct Negate {
  ExprPtr operand;
};
struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct Call {
  Function fn;
  std::vector<ExprPtr> args;
};

}  // namespace node

// Immutable expression tree node. Trees are shared, never mutated.
struct Expr {
  using Variant = std::variant<node::Constant, node::StateRef, node::ParamRef,
                               node::TimeRef, node::Negate, node::Binary,
                               node::Call>;
  Variant value;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&value);
  }
};

ExprPtr make_constant(double value);
ExprPtr make_state(std::size_t index);
ExprPtr make_param(std::string name);
ExprPtr make_time();
ExprPtr make_negate(ExprPtr operand);
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_call(Function fn, std::vector<ExprPtr> args);

// Structural equality. Constants compare by bit pattern so that +0/-0 and
// distinct NaN payloads are told apart.
bool structurally_equal(const Expr& a, const Expr& b);

bool depends_on_state_or_time(const Expr& e);

}  // namespace chaoscope
