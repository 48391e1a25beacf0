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

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "chaoscope/sysdsl.hpp"

namespace chaoscope {

// Cash-Karp coefficients; the embedded 4th-order estimate is not used.
namespace cash_karp {
inline constexpr double c[6] = {0.0, 1.0 / 5.0, 3.0 / 10.0, 3.0 / 5.0, 1.0, 7.0 / 8.0};
inline constexpr double a[6][5] = {
    {},
    {1.0 / 5.0},
    {3.0 / 40.0, 9.0 / 40.0},
    {3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0},
    {-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0},
    {1631.0 / 55296.0, 175.0 / 512.0, 575.0 / 13824.0, 44275.0 / 110592.0, 253.0 / 4096.0},
};
inline constexpr double b[6] = {37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0,
                                512.0 / 1771.0};
}  // namespace cash_karp

struct PluginSpec {
  std::filesystem::path kernel_source_path;
  std::filesystem::path driver_source_path;
  std::string compile_command;
  std::filesystem::path executable_path;
  std::filesystem::path workdir;
  std::chrono::milliseconds timeout{std::chrono::minutes(10)};
};

struct NativeRk5 {};

struct IntegratorConfig {
  std::variant<NativeRk5, PluginSpec> method = NativeRk5{};
  double h = 0.01;
  double t0 = 0.0;
  double t1 = 1.0;
  std::size_t sample_stride = 1;

  bool uses_plugin() const { return std::holds_alternative<PluginSpec>(method); }
  // Throws Error(kValidation) on violated invariants.
  void validate() const;
};

struct Completed {};
struct Failed {
  std::string reason;
  double last_good_time;
};

struct Trajectory {
  std::size_t ic_index = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::variant<Completed, Failed> status = Completed{};

  bool completed() const { return std::holds_alternative<Completed>(status); }
  const std::vector<double>& final_state() const { return states.back(); }
};

// Number of full steps and the length of the trailing partial step (zero if
// the range is an integer multiple of h, within rounding).
struct StepPlan {
  std::size_t full_steps;
  double last_step;
  std::size_t total_steps() const { return full_steps + (last_step > 0.0 ? 1 : 0); }
};
StepPlan plan_steps(double t0, double t1, double h);

// Expected number of recorded samples for a run that completes.
std::size_t expected_sample_count(const IntegratorConfig& cfg);

// One explicit Cash-Karp 5th-order step. Throws DomainError if F leaves its
// domain at any stage.
std::vector<double> rk5_step(const SystemDef& sys, double t, std::span<const double> x,
                             double h);

// Reusable stepping workspace for one system; not thread-safe, use one per
// worker.
class Rk5Stepper {
 public:
  explicit Rk5Stepper(const SystemDef& sys);

  std::size_t dimension() const { return n_; }

  // Advances x in place. Returns false (x untouched) on a domain error, with
  // the failing component in *failed_component.
  bool step(double t, double* x, double h, std::size_t* failed_component = nullptr);

 private:
  CompiledSystem rhs_;
  std::size_t n_;
  std::vector<double> k_[6];
  std::vector<double> tmp_;
};

// Fixed-step integration from cfg.t0 to cfg.t1 with the native stepper.
// Failure (domain error or non-finite state) is reported through
// Trajectory::status; the recorded prefix is kept.
Trajectory integrate(const SystemDef& sys, std::span<const double> x0,
                     const IntegratorConfig& cfg, std::size_t ic_index = 0);

// Same as integrate() but reuses an existing stepper.
Trajectory integrate_with(Rk5Stepper& stepper, std::span<const double> x0,
                          const IntegratorConfig& cfg, std::size_t ic_index = 0);

// ---- external kernel plugin ----

inline constexpr const char* kDefaultCompileCommand =
    "cc -std=c99 -O2 -ffp-contract=off -o {exe} {src} -lm";

// Emits the kernel and driver sources into workdir, compiles them with
// compile_command ({src} expands to both quoted source paths, {exe} to the
// executable path) and verifies a one-step handshake against rk5_step.
PluginSpec build_plugin(const SystemDef& sys, std::string_view dialect,
                        const std::string& compile_command,
                        const std::filesystem::path& workdir);

// Runs the plugin as a black box through its input/output files.
Trajectory run_plugin(const PluginSpec& plugin, std::span<const double> x0,
                      const IntegratorConfig& cfg, std::size_t ic_index = 0);

// Dispatches on cfg.method.
Trajectory integrate_any(const SystemDef& sys, std::span<const double> x0,
                         const IntegratorConfig& cfg, std::size_t ic_index = 0);

// Source of the stepping driver linked against every kernel.
const std::string& plugin_driver_source();

// Plugin file formats, exposed for tests and external tools.
std::string format_plugin_input(std::span<const double> x0, const IntegratorConfig& cfg);
// Parses a plugin output file body. Throws Error(kPluginOutput) naming the
// 1-based line and field of the first malformed record.
Trajectory parse_plugin_output(const std::string& body, std::size_t dimension);

}  // namespace chaoscope
