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
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "chaoscope/error.hpp"
#include "chaoscope/sysdsl.hpp"
#include "test_util.hpp"

namespace chaoscope {
namespace {

using testing::TempDir;

const char* kHarness = R"(#include <stdio.h>
void derivs(double t, const double *x, double *dxdt);
int main(void) {
  double t, x[8], d[8];
  int n;
  if (scanf("%d", &n) != 1) return 1;
  while (scanf("%lf", &t) == 1) {
    for (int i = 0; i < n; ++i) scanf("%lf", &x[i]);
    derivs(t, x, d);
    for (int i = 0; i < n; ++i) printf("%.17g ", d[i]);
    printf("\n");
  }
  return 0;
}
)";

std::string run_capture(const std::string& cmd) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  pclose(p);
  return out;
}

// Compiles the emitted kernel with a small driver and evaluates it at
// random points; returns one row of derivatives per point.
std::vector<std::vector<double>> eval_compiled(const SystemDef& sys, std::string_view dialect,
                                               const std::vector<std::pair<double, std::vector<double>>>& pts,
                                               const std::string& libs) {
  TempDir dir;
  testing::write_text(dir / "derivs.c", emit_kernel_source(sys, dialect));
  testing::write_text(dir / "main.c", kHarness);
  std::string exe = (dir / "k").string();
  std::string cc = "cc -std=c99 -O2 -ffp-contract=off -o " + exe + " " + (dir / "derivs.c").string() +
                   " " + (dir / "main.c").string() + " " + libs + " 2>&1";
  std::string diag = run_capture(cc);
  EXPECT_TRUE(std::filesystem::exists(exe)) << diag;
  std::ostringstream in;
  in.precision(17);
  in << sys.dimension() << "\n";
  for (const auto& [t, x] : pts) {
    in << t;
    for (double v : x) in << " " << v;
    in << "\n";
  }
  testing::write_text(dir / "in.txt", in.str());
  std::istringstream out(run_capture(exe + " < " + (dir / "in.txt").string()));
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<double> row(sys.dimension());
    for (auto& v : row) out >> v;
    rows.push_back(row);
  }
  return rows;
}

TEST(Codegen, CompiledKernelMatchesEvaluatorAtRandomPoints) {
  SystemDef sys = parse_system(
      "param a = 1.5\nparam c = -0.25\n"
      "diff(x,t) = a*sin(y) - c*x^3 + exp(-t)\n"
      "diff(y,t) = sqrt(abs(x*y) + 1) - cos(z)/(1 + z^2)\n"
      "diff(z,t) = ln(1 + x^2) * (y)^0.5 - z^-2\n",
      "mixed");
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  std::vector<std::pair<double, std::vector<double>>> pts;
  for (int i = 0; i < 100; ++i) pts.push_back({u(gen), {u(gen) - 1.5, u(gen), u(gen)}});
  auto rows = eval_compiled(sys, "c99", pts, "-lm");
  ASSERT_EQ(rows.size(), pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto want = eval_rhs(sys, pts[i].first, pts[i].second);
    for (std::size_t c = 0; c < want.size(); ++c) {
      double rel = std::fabs(rows[i][c] - want[c]) / std::max(1.0, std::fabs(want[c]));
      EXPECT_LE(rel, 1e-12) << "point " << i << " component " << c;
    }
  }
}

TEST(Codegen, FreestandingDialectCompilesWithoutLibm) {
  SystemDef sys = parse_system("param k = 2\ndiff(x,t) = -k*x + abs(y)^3\ndiff(y,t) = x/(1 + y^2)");
  std::vector<std::pair<double, std::vector<double>>> pts = {{0.0, {1.0, -2.0}}, {1.0, {0.5, 0.25}}};
  auto rows = eval_compiled(sys, "c99-freestanding", pts, "");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_EQ(rows[i], eval_rhs(sys, pts[i].first, pts[i].second));
  }
}

TEST(Codegen, Errors) {
  SystemDef trig = parse_system("diff(x,t) = sin(x)");
  try {
    emit_kernel_source(trig, "c99-freestanding");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kUnmappedFunction);
  }
  try {
    emit_kernel_source(trig, "fortran77");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kUnsupportedDialect);
  }
  SystemDef real_pow = parse_system("diff(x,t) = x^0.5");
  EXPECT_THROW(emit_kernel_source(real_pow, "c99-freestanding"), Error);
}

TEST(Codegen, DeterministicAndExposesEntryPoint) {
  SystemDef sys = testing::load_system("lorenz.sys");
  std::string a = emit_kernel_source(sys, "c99");
  EXPECT_EQ(a, emit_kernel_source(sys, "c99"));
  EXPECT_NE(a.find("void derivs(double t, const double *x, double *dxdt)"), std::string::npos);
  EXPECT_EQ(supported_dialects(), (std::vector<std::string>{"c99", "c99-freestanding"}));
}

}  // namespace
}  // namespace chaoscope
