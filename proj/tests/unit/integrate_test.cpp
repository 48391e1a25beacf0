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

#include <gtest/gtest.h>

#include "chaoscope/error.hpp"
#include "chaoscope/integrate.hpp"
#include "test_util.hpp"

namespace chaoscope {
namespace {

IntegratorConfig config(double t0, double t1, double h, std::size_t stride = 1) {
  IntegratorConfig c;
  c.t0 = t0;
  c.t1 = t1;
  c.h = h;
  c.sample_stride = stride;
  return c;
}

TEST(CashKarp, WeightsAndNodesAreConsistent) {
  double sum = 0.0;
  for (double b : cash_karp::b) sum += b;
  EXPECT_EQ(sum, 1.0);
  for (int i = 1; i < 6; ++i) {
    double row = 0.0;
    for (int j = 0; j < i; ++j) row += cash_karp::a[i][j];
    EXPECT_NEAR(row, cash_karp::c[i], 1e-15);
  }
}

TEST(Integrate, ConstantFieldIsExact) {
  SystemDef s = parse_system("diff(x,t) = 1");
  Trajectory tr = integrate(s, std::vector<double>{0.0}, config(0.0, 3.0, 0.5));
  ASSERT_TRUE(tr.completed());
  ASSERT_EQ(tr.times.size(), 7u);
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    EXPECT_EQ(tr.times[i], 0.5 * static_cast<double>(i));
    EXPECT_EQ(tr.states[i][0], 0.5 * static_cast<double>(i));
  }
}

TEST(Integrate, FifthOrderConvergence) {
  SystemDef s = parse_system("diff(x,t) = x");
  double err[3];
  const double hs[3] = {0.1, 0.05, 0.025};
  for (int i = 0; i < 3; ++i) {
    Trajectory tr = integrate(s, std::vector<double>{1.0}, config(0.0, 1.0, hs[i]));
    err[i] = std::fabs(tr.final_state()[0] - std::exp(1.0));
  }
  for (int i = 0; i < 2; ++i) {
    double ratio = err[i] / err[i + 1];
    EXPECT_GE(ratio, 25.0);
    EXPECT_LE(ratio, 40.0);
  }
}

TEST(Integrate, HarmonicOscillatorEnergyDrift) {
  SystemDef s = testing::load_system("oscillator.sys");
  Trajectory tr = integrate(s, std::vector<double>{1.0, 0.0}, config(0.0, 100.0, 0.01, 100));
  ASSERT_TRUE(tr.completed());
  auto energy = [](const std::vector<double>& x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); };
  const double e0 = energy(tr.states.front());
  EXPECT_EQ(tr.times.back(), 100.0);
  EXPECT_LT(std::fabs(energy(tr.final_state()) - e0) / e0, 1e-8);
  // Phase is also tracked: x(100) = cos(100).
  EXPECT_NEAR(tr.final_state()[0], std::cos(100.0), 1e-8);
}

TEST(Integrate, SampleStrideAndPartialLastStep) {
  SystemDef s = parse_system("diff(x,t) = 1");
  IntegratorConfig c = config(0.0, 1.05, 0.1, 3);
  StepPlan plan = plan_steps(c.t0, c.t1, c.h);
  EXPECT_EQ(plan.full_steps, 10u);
  EXPECT_NEAR(plan.last_step, 0.05, 1e-12);
  Trajectory tr = integrate(s, std::vector<double>{0.0}, c);
  // t = 0, 0.3, 0.6, 0.9 from the stride, then the end point.
  ASSERT_EQ(tr.times.size(), 5u);
  EXPECT_EQ(tr.times.size(), expected_sample_count(c));
  EXPECT_EQ(tr.times.back(), 1.05);
  EXPECT_NEAR(tr.final_state()[0], 1.05, 1e-14);
}

TEST(Integrate, TimeGridHasNoAccumulatedDrift) {
  SystemDef s = parse_system("diff(x,t) = 0");
  Trajectory tr = integrate(s, std::vector<double>{0.0}, config(0.0, 37.0, 0.01, 1));
  ASSERT_EQ(tr.times.size(), 3701u);
  EXPECT_EQ(tr.times[1234], 12.34);
  EXPECT_EQ(tr.times.back(), 37.0);
}

TEST(Integrate, BlowUpReportsFailureAndKeepsPrefix) {
  SystemDef s = parse_system("diff(x,t) = x^2");
  Trajectory tr = integrate(s, std::vector<double>{1.0}, config(0.0, 2.0, 0.01));
  ASSERT_FALSE(tr.completed());
  const auto& f = std::get<Failed>(tr.status);
  // The discrete solution lags the analytic singularity at t = 1 slightly.
  EXPECT_LT(f.last_good_time, 1.1);
  EXPECT_GT(f.last_good_time, 0.9);
  EXPECT_EQ(tr.times.back(), f.last_good_time);
  for (const auto& x : tr.states) EXPECT_TRUE(std::isfinite(x[0]));
}

TEST(Integrate, DomainErrorBecomesFailure) {
  SystemDef s = parse_system("diff(x,t) = -1\ndiff(y,t) = sqrt(x)");
  Trajectory tr = integrate(s, std::vector<double>{0.5, 0.0}, config(0.0, 2.0, 0.1));
  ASSERT_FALSE(tr.completed());
  EXPECT_NE(std::get<Failed>(tr.status).reason.find("domain"), std::string::npos);
}

TEST(Integrate, ValidatesConfig) {
  SystemDef s = parse_system("diff(x,t) = 1");
  EXPECT_THROW(integrate(s, std::vector<double>{0.0}, config(0.0, 1.0, 0.0)), Error);
  EXPECT_THROW(integrate(s, std::vector<double>{0.0}, config(1.0, 1.0, 0.1)), Error);
  EXPECT_THROW(integrate(s, std::vector<double>{0.0}, config(0.0, 1.0, 0.1, 0)), Error);
  EXPECT_THROW(integrate(s, std::vector<double>{0.0}, config(0.0, 0.05, 0.1)), Error);
  EXPECT_THROW(integrate(s, std::vector<double>{0.0, 1.0}, config(0.0, 1.0, 0.1)), Error);
}

TEST(Integrate, StepperReuseGivesIdenticalResults) {
  SystemDef s = testing::load_system("lorenz.sys");
  Rk5Stepper st(s);
  IntegratorConfig c = config(0.0, 5.0, 0.01, 10);
  Trajectory a = integrate_with(st, std::vector<double>{1.0, 2.0, 3.0}, c);
  Trajectory b = integrate_with(st, std::vector<double>{1.0, 2.0, 3.0}, c);
  Trajectory d = integrate(s, std::vector<double>{1.0, 2.0, 3.0}, c);
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.states, d.states);
}

}  // namespace
}  // namespace chaoscope
