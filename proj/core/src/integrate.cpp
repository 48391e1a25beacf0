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

#include "chaoscope/integrate.hpp"

#include <cmath>
#include <limits>

#include "chaoscope/error.hpp"

namespace chaoscope {

namespace {

// Relative slack when deciding whether (t1 - t0) / h is an integer.
constexpr double kGridTolerance = 1e-9;

bool all_finite(const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i])) return false;
  }
  return true;
}

std::string fmt_time(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", t);
  return buf;
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(Errc::kValidation, "integration step must be positive and finite");
  }
  if (!std::isfinite(t0) || !std::isfinite(t1) || !(t1 > t0)) {
    throw Error(Errc::kValidation, "time range must satisfy t0 < t1");
  }
  if (sample_stride < 1) {
    throw Error(Errc::kValidation, "sample stride must be at least 1");
  }
  if ((t1 - t0) / h < 1.0 - kGridTolerance) {
    throw Error(Errc::kValidation, "time range must contain at least one full step");
  }
}

StepPlan plan_steps(double t0, double t1, double h) {
  const double ratio = (t1 - t0) / h;
  const double nearest = std::round(ratio);
  if (std::fabs(ratio - nearest) <= kGridTolerance * std::fmax(1.0, ratio)) {
    return {static_cast<std::size_t>(nearest), 0.0};
  }
  const double full = std::floor(ratio);
  return {static_cast<std::size_t>(full), t1 - (t0 + full * h)};
}

std::size_t expected_sample_count(const IntegratorConfig& cfg) {
  const StepPlan plan = plan_steps(cfg.t0, cfg.t1, cfg.h);
  std::size_t count = plan.full_steps / cfg.sample_stride + 1;
  const bool final_on_grid = plan.last_step == 0.0 && plan.full_steps % cfg.sample_stride == 0;
  if (!final_on_grid) ++count;
  return count;
}

Rk5Stepper::Rk5Stepper(const SystemDef& sys) : rhs_(sys), n_(sys.dimension()), tmp_(n_) {
  for (auto& k : k_) k.assign(n_, 0.0);
}

bool Rk5Stepper::step(double t, double* x, double h, std::size_t* failed_component) {
  using namespace cash_karp;
  if (!rhs_.eval(t, x, k_[0].data(), failed_component)) return false;
  for (int s = 1; s < 6; ++s) {
    for (std::size_t i = 0; i < n_; ++i) {
      double acc = a[s][0] * k_[0][i];
      for (int j = 1; j < s; ++j) acc = acc + a[s][j] * k_[j][i];
      tmp_[i] = x[i] + h * acc;
    }
    if (!rhs_.eval(t + c[s] * h, tmp_.data(), k_[s].data(), failed_component)) return false;
  }
  for (std::size_t i = 0; i < n_; ++i) {
    // b[1] and b[4] are zero and skipped.
    double acc = b[0] * k_[0][i];
    acc = acc + b[2] * k_[2][i];
    acc = acc + b[3] * k_[3][i];
    acc = acc + b[5] * k_[5][i];
    x[i] = x[i] + h * acc;
  }
  return true;
}

std::vector<double> rk5_step(const SystemDef& sys, double t, std::span<const double> x,
                             double h) {
  if (x.size() != sys.dimension()) {
    throw Error(Errc::kValidation, "state length does not match system dimension");
  }
  if (!(h > 0.0)) throw Error(Errc::kValidation, "step must be positive");
  Rk5Stepper stepper(sys);
  std::vector<double> out(x.begin(), x.end());
  std::size_t bad = 0;
  if (!stepper.step(t, out.data(), h, &bad)) {
    throw DomainError(bad, "right-hand side left its domain during the step at t=" +
                               fmt_time(t));
  }
  return out;
}

Trajectory integrate_with(Rk5Stepper& stepper, std::span<const double> x0,
                          const IntegratorConfig& cfg, std::size_t ic_index) {
  cfg.validate();
  const std::size_t n = stepper.dimension();
  if (x0.size() != n) {
    throw Error(Errc::kValidation, "initial condition has length " +
                                       std::to_string(x0.size()) + ", expected " +
                                       std::to_string(n));
  }
  const StepPlan plan = plan_steps(cfg.t0, cfg.t1, cfg.h);

  Trajectory traj;
  traj.ic_index = ic_index;
  std::vector<double> x(x0.begin(), x0.end());
  traj.times.push_back(cfg.t0);
  traj.states.push_back(x);
  if (!all_finite(x.data(), n)) {
    traj.status = Failed{"non-finite initial condition", cfg.t0};
    return traj;
  }

  const std::size_t total = plan.total_steps();
  for (std::size_t i = 0; i < total; ++i) {
    const double t = cfg.t0 + static_cast<double>(i) * cfg.h;
    const bool partial = i == plan.full_steps;
    const double step = partial ? plan.last_step : cfg.h;
    std::size_t bad = 0;
    if (!stepper.step(t, x.data(), step, &bad)) {
      traj.status = Failed{"domain error in component " + std::to_string(bad) + " at t=" +
                               fmt_time(t),
                           t};
      return traj;
    }
    if (!all_finite(x.data(), n)) {
      traj.status = Failed{"non-finite state after step from t=" + fmt_time(t), t};
      return traj;
    }
    const std::size_t done = i + 1;
    const bool last = done == total;
    const double t_next = last ? cfg.t1 : cfg.t0 + static_cast<double>(done) * cfg.h;
    if (last || (!partial && done % cfg.sample_stride == 0)) {
      traj.times.push_back(t_next);
      traj.states.push_back(x);
    }
  }
  return traj;
}

Trajectory integrate(const SystemDef& sys, std::span<const double> x0,
                     const IntegratorConfig& cfg, std::size_t ic_index) {
  Rk5Stepper stepper(sys);
  return integrate_with(stepper, x0, cfg, ic_index);
}

Trajectory integrate_any(const SystemDef& sys, std::span<const double> x0,
                         const IntegratorConfig& cfg, std::size_t ic_index) {
  if (const auto* plugin = std::get_if<PluginSpec>(&cfg.method)) {
    return run_plugin(*plugin, x0, cfg, ic_index);
  }
  return integrate(sys, x0, cfg, ic_index);
}

}  // namespace chaoscope
