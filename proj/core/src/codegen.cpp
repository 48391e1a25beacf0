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

#include <charconv>
#include <cmath>
#include <string>

#include "chaoscope/error.hpp"
#include "chaoscope/sysdsl.hpp"

namespace chaoscope {

namespace {

struct Dialect {
  std::string_view name;
  bool has_libm;
};

constexpr Dialect kDialects[] = {
    {"c99", true},
    {"c99-freestanding", false},
};

const Dialect& find_dialect(std::string_view name) {
  for (const auto& d : kDialects) {
    if (d.name == name) return d;
  }
  std::string known;
  for (const auto& d : kDialects) {
    if (!known.empty()) known += ", ";
    known += d.name;
  }
  throw Error(Errc::kUnsupportedDialect,
              "unsupported dialect '" + std::string(name) + "' (known: " + known + ")");
}

// Literal that reads back as the identical double in C.
std::string c_literal(double v) {
  if (!std::isfinite(v)) {
    throw Error(Errc::kValidation, "non-finite constant cannot be emitted");
  }
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  std::string s(buf, ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  if (v < 0 || (v == 0.0 && std::signbit(v))) s = "(" + s + ")";
  return s;
}

class Emitter {
 public:
  Emitter(const SystemDef& sys, const Dialect& dialect) : sys_(sys), dialect_(dialect) {}

  std::string emit(const Expr& e) {
    if (auto* c = e.as<node::Constant>()) return c_literal(c->value);
    if (auto* s = e.as<node::StateRef>()) return "x[" + std::to_string(s->index) + "]";
    if (auto* p = e.as<node::ParamRef>()) return c_literal(sys_.parameter(p->name));
    if (e.as<node::TimeRef>()) return "t";
    if (auto* n = e.as<node::Negate>()) return "(-" + emit(*n->operand) + ")";
    if (auto* b = e.as<node::Binary>()) {
      if (b->op == BinaryOp::kPow) return emit_power(*b);
      return "(" + emit(*b->lhs) + " " + binary_op_symbol(b->op) + " " + emit(*b->rhs) + ")";
    }
    auto* call = e.as<node::Call>();
    const std::string arg = emit(*call->args.at(0));
    if (call->fn == Function::kAbs && !dialect_.has_libm) {
      return "((" + arg + ") < 0.0 ? -(" + arg + ") : (" + arg + "))";
    }
    if (!dialect_.has_libm) unmapped(function_name(call->fn));
    switch (call->fn) {
      case Function::kSin: return "sin(" + arg + ")";
      case Function::kCos: return "cos(" + arg + ")";
      case Function::kExp: return "exp(" + arg + ")";
      case Function::kLn: return "log(" + arg + ")";
      case Function::kSqrt: return "sqrt(" + arg + ")";
      case Function::kAbs: return "fabs(" + arg + ")";
    }
    return "";
  }

 private:
  std::string emit_power(const node::Binary& b) {
    const double exponent = eval_expr(*b.rhs, sys_, 0.0, {});
    const std::string base = emit(*b.lhs);
    if (exponent == std::floor(exponent) && std::fabs(exponent) <= 64.0) {
      const long long n = static_cast<long long>(exponent);
      if (n == 0) return "1.0";
      const long long m = n < 0 ? -n : n;
      std::string chain = base;
      for (long long i = 1; i < m; ++i) chain += " * " + base;
      return n < 0 ? "(1.0 / (" + chain + "))" : "(" + chain + ")";
    }
    if (!dialect_.has_libm) unmapped("pow");
    return "pow(" + base + ", " + c_literal(exponent) + ")";
  }

  [[noreturn]] void unmapped(std::string_view fn) const {
    throw Error(Errc::kUnmappedFunction, "function '" + std::string(fn) +
                                             "' has no mapping in dialect '" +
                                             std::string(dialect_.name) + "'");
  }

  const SystemDef& sys_;
  const Dialect& dialect_;
};

bool is_ascii(const std::string& s) {
  for (unsigned char c : s) {
    if (c > 0x7f) return false;
  }
  return true;
}

}  // namespace

std::vector<std::string> supported_dialects() {
  std::vector<std::string> out;
  for (const auto& d : kDialects) out.emplace_back(d.name);
  return out;
}

std::string emit_kernel_source(const SystemDef& sys, std::string_view dialect_name) {
  const Dialect& dialect = find_dialect(dialect_name);
  Emitter emitter(sys, dialect);

  std::vector<std::string> lines;
  for (std::size_t i = 0; i < sys.dimension(); ++i) {
    lines.push_back("  dxdt[" + std::to_string(i) + "] = " + emitter.emit(*sys.rhs()[i]) + ";");
  }

  std::string name = is_ascii(sys.name()) ? sys.name() : std::string("system");
  for (auto& c : name) {
    if (c == '*' || c == '/') c = '_';
  }
  std::string out;
  out += "/* Right-hand side of system '" + name + "' (generated, dialect " +
         std::string(dialect.name) + "). */\n";
  for (std::size_t i = 0; i < sys.dimension(); ++i) {
    out += "/*   x[" + std::to_string(i) + "] = " + sys.state_vars()[i] + " */\n";
  }
  if (dialect.has_libm) out += "#include <math.h>\n";
  out += "\nvoid derivs(double t, const double *x, double *dxdt)\n{\n";
  out += "  (void)t;\n  (void)x;\n";
  for (const auto& l : lines) out += l + "\n";
  out += "}\n";
  return out;
}

}  // namespace chaoscope
