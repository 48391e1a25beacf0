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
#include <random>

#include <gtest/gtest.h>

#include "chaoscope/error.hpp"
#include "chaoscope/sysdsl.hpp"
#include "test_util.hpp"

namespace chaoscope {
namespace {

using testing::kLorenz;

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::kIo;
}

TEST(ParseSystem, LorenzStructure) {
  SystemDef s = parse_system(kLorenz, "lorenz");
  EXPECT_EQ(s.name(), "lorenz");
  ASSERT_EQ(s.dimension(), 3u);
  EXPECT_EQ(s.state_vars(), (std::vector<std::string>{"x", "y", "z"}));
  EXPECT_EQ(s.parameter("sigma"), 10.0);
  EXPECT_EQ(s.parameter("b"), 8.0 / 3.0);
  EXPECT_EQ(s.state_index("z"), 2u);
  EXPECT_EQ(s.state_index("w"), 3u);
}

TEST(ParseSystem, EquationsMayAppearInAnyOrderAndUseSemicolons) {
  SystemDef s = parse_system("diff(v,t) = -x; diff(x,t) = v");
  EXPECT_EQ(s.state_vars(), (std::vector<std::string>{"v", "x"}));
  auto d = eval_rhs(s, 0.0, std::vector<double>{2.0, 3.0});
  EXPECT_EQ(d[0], -3.0);
  EXPECT_EQ(d[1], 2.0);
}

TEST(ParseSystem, ParameterMayUseEarlierParameters) {
  SystemDef s = parse_system("param a = 2\nparam c = a^3 - 1/4\ndiff(x,t) = c*x");
  EXPECT_EQ(s.parameter("c"), 7.75);
}

TEST(ParseSystem, Errors) {
  EXPECT_EQ(code_of([] { parse_system("diff(x,t) = x\ndiff(x,t) = 1"); }), Errc::kDuplicateEquation);
  EXPECT_EQ(code_of([] { parse_system("diff(x,t) = y"); }), Errc::kMissingEquation);
  EXPECT_EQ(code_of([] { parse_system("diff(x,t) = foo(x)"); }), Errc::kUndeclaredIdentifier);
  EXPECT_EQ(code_of([] { parse_system("param a = b\ndiff(x,t) = a"); }), Errc::kUndeclaredIdentifier);
  EXPECT_EQ(code_of([] { parse_system("diff(x,t) = x^x"); }), Errc::kSyntax);
  EXPECT_EQ(code_of([] { parse_system("diff(x,t) = sin(x, x)"); }), Errc::kSyntax);
  EXPECT_EQ(code_of([] { parse_system("param x = 1\ndiff(x,t) = 1"); }), Errc::kSyntax);
  EXPECT_EQ(code_of([] { parse_system("# nothing\n"); }), Errc::kSyntax);
}

TEST(ParseSystem, SyntaxErrorCarriesLocation) {
  try {
    parse_system("diff(x,t) = 1\ndiff(y,t) = (x + ");
    FAIL() << "expected a syntax error";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GT(e.column(), 1u);
    EXPECT_NE(std::string(e.what()).find("2:"), std::string::npos);
  }
}

TEST(ParseSystem, PowerIsRightAssociativeAndBindsTighterThanUnaryMinus) {
  SystemDef s = parse_system("diff(x,t) = -2^3^2\ndiff(y,t) = 2^-1");
  auto d = eval_rhs(s, 0.0, std::vector<double>{0.0, 0.0});
  EXPECT_EQ(d[0], -512.0);
  EXPECT_EQ(d[1], 0.5);
}

// Integer-valued oracle: for integer inputs every intermediate below is an
// exactly representable integer, so double evaluation must match exactly.
TEST(EvalRhs, MatchesIntegerArithmeticOracle) {
  SystemDef s = parse_system(
      "param a = 3\n"
      "diff(x,t) = a*x*y - z^2 + 7\n"
      "diff(y,t) = (x - y)*(x + z) - t\n"
      "diff(z,t) = -x^3 + abs(y - 5)*2\n");
  std::mt19937 gen(7);
  std::uniform_int_distribution<long long> d(-50, 50);
  for (int trial = 0; trial < 500; ++trial) {
    long long x = d(gen), y = d(gen), z = d(gen), t = d(gen);
    long long f0 = 3 * x * y - z * z + 7;
    long long f1 = (x - y) * (x + z) - t;
    long long f2 = -x * x * x + std::llabs(y - 5) * 2;
    auto got = eval_rhs(s, static_cast<double>(t),
                        std::vector<double>{double(x), double(y), double(z)});
    ASSERT_EQ(got[0], static_cast<double>(f0));
    ASSERT_EQ(got[1], static_cast<double>(f1));
    ASSERT_EQ(got[2], static_cast<double>(f2));
  }
}

TEST(EvalRhs, LorenzMatchesHandWrittenFormula) {
  SystemDef s = parse_system(kLorenz);
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  const double sigma = 10.0, b = 8.0 / 3.0, R = 28.0;
  for (int trial = 0; trial < 1000; ++trial) {
    double x = u(gen), y = u(gen), z = u(gen);
    auto d = eval_rhs(s, 0.0, std::vector<double>{x, y, z});
    EXPECT_EQ(d[0], sigma * (y - x));
    EXPECT_EQ(d[1], -(x * z) + R * x - y);
    EXPECT_EQ(d[2], x * y - b * z);
  }
}

TEST(EvalRhs, DomainErrorNamesComponent) {
  SystemDef s = parse_system("diff(x,t) = 1\ndiff(y,t) = ln(x)\ndiff(z,t) = 1/y");
  try {
    eval_rhs(s, 0.0, std::vector<double>{0.0, 1.0, 1.0});
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_EQ(e.code(), Errc::kDomain);
    EXPECT_EQ(e.component(), 1u);
  }
  try {
    eval_rhs(s, 0.0, std::vector<double>{1.0, 0.0, 1.0});
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_EQ(e.component(), 2u);
  }
  SystemDef r = parse_system("diff(x,t) = sqrt(x) + (x)^0.5");
  EXPECT_THROW(eval_rhs(r, 0.0, std::vector<double>{-1.0}), DomainError);
}

TEST(EvalRhs, WithParametersRebinds) {
  SystemDef s = parse_system(kLorenz).with_parameters({{"R", 20.0}});
  auto d = eval_rhs(s, 0.0, std::vector<double>{1.0, 0.0, 0.0});
  EXPECT_EQ(d[1], 20.0);
  EXPECT_THROW(parse_system(kLorenz).with_parameters({{"Q", 1.0}}), Error);
}

TEST(PrettyPrint, RoundTripsLorenz) {
  SystemDef s = parse_system(kLorenz, "lorenz");
  SystemDef again = parse_system(pretty_print(s), "lorenz");
  EXPECT_TRUE(structurally_equal(s, again));
  EXPECT_EQ(pretty_print(again), pretty_print(s));
}

// Random expression trees over two states and one parameter.
class ExprGen {
 public:
  explicit ExprGen(std::uint64_t seed) : gen_(seed) {}

  ExprPtr make(int depth) {
    int pick = depth <= 0 ? pick_leaf() : static_cast<int>(gen_() % 10);
    switch (pick) {
      case 0: return make_state(gen_() % 2);
      case 1: return make_param("p");
      case 2: return make_time();
      case 3: return make_constant(constant());
      case 4: return make_negate(make(depth - 1));
      case 5: return make_binary(BinaryOp::kAdd, make(depth - 1), make(depth - 1));
      case 6: return make_binary(BinaryOp::kSub, make(depth - 1), make(depth - 1));
      case 7: return make_binary(BinaryOp::kMul, make(depth - 1), make(depth - 1));
      case 8: {
        ExprPtr expo = gen_() % 2 ? make_constant(static_cast<double>(gen_() % 5))
                                  : make_negate(make_constant(1.5));
        return make_binary(BinaryOp::kPow, make(depth - 1), expo);
      }
      default: {
        Function fns[] = {Function::kSin, Function::kCos, Function::kExp,
                          Function::kLn, Function::kSqrt, Function::kAbs};
        return make_call(fns[gen_() % 6], {make(depth - 1)});
      }
    }
  }

 private:
  int pick_leaf() { return static_cast<int>(gen_() % 4); }
  double constant() {
    double pool[] = {0.0, 1.0, 2.5, 0.1, 1e-7, 123456.789, 3.0e20, 1.0 / 3.0};
    return pool[gen_() % 8];
  }
  std::mt19937_64 gen_;
};

TEST(PrettyPrint, RandomTreesRoundTrip) {
  ExprGen g(2024);
  for (int trial = 0; trial < 500; ++trial) {
    SystemDef s("sys", {"x", "y"}, {{"p", 0.75}}, {g.make(4), g.make(3)});
    const std::string text = pretty_print(s);
    SystemDef again = parse_system(text, "sys");
    ASSERT_TRUE(structurally_equal(s, again)) << text;
    ASSERT_EQ(pretty_print(again), text);
  }
}

TEST(Predicate, ParseAndEvaluate) {
  SystemDef s = parse_system(kLorenz);
  Predicate p = parse_predicate("x < -4 and x > -11", s);
  EXPECT_TRUE(eval_predicate(p, s, std::vector<double>{-5.0, 0.0, 0.0}));
  EXPECT_FALSE(eval_predicate(p, s, std::vector<double>{-12.0, 0.0, 0.0}));
  EXPECT_FALSE(eval_predicate(p.negated(), s, std::vector<double>{-5.0, 0.0, 0.0}));

  Predicate q = parse_predicate("not (x(t) >= 0) or (y + z <= R)", s);
  EXPECT_TRUE(eval_predicate(q, s, std::vector<double>{1.0, 1.0, 1.0}));
  EXPECT_FALSE(eval_predicate(q, s, std::vector<double>{1.0, 20.0, 20.0}));
  EXPECT_EQ(q.source(), "not (x(t) >= 0) or (y + z <= R)");
}

TEST(Predicate, Errors) {
  SystemDef s = parse_system(kLorenz);
  EXPECT_EQ(code_of([&] { parse_predicate("w < 0", s); }), Errc::kUndeclaredIdentifier);
  EXPECT_EQ(code_of([&] { parse_predicate("t < 0", s); }), Errc::kUndeclaredIdentifier);
  EXPECT_EQ(code_of([&] { parse_predicate("x < ", s); }), Errc::kSyntax);
  EXPECT_EQ(code_of([&] { parse_predicate("x", s); }), Errc::kSyntax);
}

TEST(Predicate, DomainErrorWhenExpressionUndefined) {
  SystemDef s = parse_system("diff(x,t) = 0");
  Predicate p = parse_predicate("ln(x) < 0", s);
  EXPECT_THROW(eval_predicate(p, s, std::vector<double>{-1.0}), DomainError);
}

}  // namespace
}  // namespace chaoscope
