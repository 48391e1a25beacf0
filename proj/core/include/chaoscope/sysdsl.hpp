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
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chaoscope/expr.hpp"

namespace chaoscope {

// Parsed ODE system dX/dt = F(X, t). Parameters are bound at parse time;
// use with_parameters() to obtain a rebound copy.
class SystemDef {
 public:
  SystemDef(std::string name, std::vector<std::string> state_vars,
            std::map<std::string, double> parameters, std::vector<ExprPtr> rhs);

  const std::string& name() const { return name_; }
  std::size_t dimension() const { return state_vars_.size(); }
  const std::vector<std::string>& state_vars() const { return state_vars_; }
  const std::map<std::string, double>& parameters() const { return parameters_; }
  const std::vector<ExprPtr>& rhs() const { return rhs_; }

  // Index of a state variable, or dimension() if absent.
  std::size_t state_index(std::string_view var) const;
  double parameter(std::string_view name) const;

  SystemDef with_parameters(const std::map<std::string, double>& overrides) const;
  SystemDef with_name(std::string name) const;

 private:
  std::string name_;
  std::vector<std::string> state_vars_;
  std::map<std::string, double> parameters_;
  std::vector<ExprPtr> rhs_;
};

bool structurally_equal(const SystemDef& a, const SystemDef& b);

// Grammar (see docs/grammar.md):
//   system     ::= (param_decl | equation)+
//   equation   ::= "diff(" ident ["(t)"] "," "t" ")" "=" expr
//   param_decl ::= "param" ident "=" const_expr
// Statements are separated by newlines or ';'. '#' starts a comment.
SystemDef parse_system(std::string_view source, std::string name = "system");

std::string print_expr(const Expr& e, const SystemDef& sys);
std::string pretty_print(const SystemDef& sys);

// F(x, t). Throws DomainError naming the offending component.
std::vector<double> eval_rhs(const SystemDef& sys, double t,
                             std::span<const double> x);

// Evaluates a single expression against sys (for tests and predicates).
double eval_expr(const Expr& e, const SystemDef& sys, double t,
                 std::span<const double> x);

// Flattened stack program for one expression. Used in the integration hot
// loop; evaluation order and rounding match the emitted C kernels.
class ExprProgram {
 public:
  enum class Status { kOk, kDomain };

  ExprProgram() = default;
  ExprProgram(const Expr& e, const SystemDef& sys);

  // Evaluates into *out. scratch must hold at least stack_depth() doubles.
  Status eval(double t, const double* x, double* scratch, double* out) const;
  std::size_t stack_depth() const { return depth_; }

 private:
  enum class Op : unsigned char {
    kConst, kState, kTime, kNeg, kAdd, kSub, kMul, kDiv,
    kPowInt, kPowReal, kSin, kCos, kExp, kLn, kSqrt, kAbs,
  };
  struct Instr {
    Op op;
    long long ival;
    double dval;
  };

  void compile(const Expr& e, const SystemDef& sys, std::size_t level);

  std::vector<Instr> code_;
  std::size_t depth_ = 0;
};

// All right-hand sides compiled; evaluation without allocation.
class CompiledSystem {
 public:
  explicit CompiledSystem(const SystemDef& sys);

  std::size_t dimension() const { return programs_.size(); }

  // Writes F(x, t) to dxdt. On domain failure returns false and sets
  // *failed_component.
  bool eval(double t, const double* x, double* dxdt,
            std::size_t* failed_component) const;

 private:
  std::vector<ExprProgram> programs_;
  mutable std::vector<double> scratch_;
};

// ---- predicates ----

enum class Comparison { kLess, kGreater, kLessEqual, kGreaterEqual };

struct PredNode;
using PredPtr = std::shared_ptr<const PredNode>;

struct PredNode {
  enum class Kind { kCompare, kAnd, kOr, kNot };
  Kind kind;
  Comparison cmp = Comparison::kLess;
  ExprPtr lhs;
  ExprPtr rhs;
  PredPtr left;
  PredPtr right;
};

// Boolean classification predicate over the final state of an orbit.
class Predicate {
 public:
  Predicate(PredPtr root, std::string source)
      : root_(std::move(root)), source_(std::move(source)) {}

  const PredNode& root() const { return *root_; }
  const std::string& source() const { return source_; }

  Predicate negated() const;

 private:
  PredPtr root_;
  std::string source_;
};

// Grammar: or_expr ::= and_expr ("or" and_expr)*;
//          and_expr ::= unary ("and" unary)*;
//          unary ::= "not" unary | "(" or_expr ")" | expr cmp expr
// Identifiers are resolved against sys; time references are rejected.
Predicate parse_predicate(std::string_view source, const SystemDef& sys);

bool eval_predicate(const Predicate& p, const SystemDef& sys,
                    std::span<const double> x);

// ---- code generation ----

// Supported dialects: "c99" (hosted, libm) and "c99-freestanding" (no
// libm; transcendental functions and non-integer powers are rejected).
// Entry point: void derivs(double t, const double *x, double *dxdt)
std::string emit_kernel_source(const SystemDef& sys, std::string_view dialect);

std::vector<std::string> supported_dialects();

}  // namespace chaoscope
