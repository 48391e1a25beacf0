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

#include <filesystem>
#include <vector>

#include <benchmark/benchmark.h>
#include <unistd.h>

#include "bench_util.hpp"
#include "chaoscope/boundary.hpp"
#include "chaoscope/integrate.hpp"

namespace chaoscope {
namespace {

IntegratorConfig table_config() {
  IntegratorConfig cfg;
  cfg.h = 0.002;
  cfg.t0 = 0.0;
  cfg.t1 = 11.0;
  cfg.sample_stride = 5;
  return cfg;
}

const std::vector<double> kStart = {-0.377165, 0.486855, -0.298935};

void BM_NativeLorenz(benchmark::State& state) {
  SystemDef sys = bench::lorenz();
  IntegratorConfig cfg = table_config();
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate(sys, kStart, cfg).final_state());
  }
}
BENCHMARK(BM_NativeLorenz)->Unit(benchmark::kMillisecond);

// Includes process start and file exchange; the build happens once.
void BM_PluginLorenz(benchmark::State& state) {
  SystemDef sys = bench::lorenz();
  auto dir = std::filesystem::temp_directory_path() /
             ("chaoscope-bench-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  IntegratorConfig cfg = table_config();
  try {
    cfg.method = build_plugin(sys, "c99", kDefaultCompileCommand, dir);
  } catch (const std::exception& e) {
    state.SkipWithError(e.what());
    std::filesystem::remove_all(dir);
    return;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_any(sys, kStart, cfg).final_state());
  }
  std::filesystem::remove_all(dir);
}
BENCHMARK(BM_PluginLorenz)->Unit(benchmark::kMillisecond);

void BM_StepperLorenz(benchmark::State& state) {
  SystemDef sys = bench::lorenz();
  Rk5Stepper stepper(sys);
  std::vector<double> x = kStart;
  double t = 0.0;
  for (auto _ : state) {
    stepper.step(t, x.data(), 0.002);
    t += 0.002;
    if (t > 11.0) {
      x = kStart;
      t = 0.0;
    }
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StepperLorenz);

void BM_BoxcountLorenz(benchmark::State& state) {
  SystemDef sys = bench::lorenz().with_parameters({{"R", 20.0}});
  Predicate p = parse_predicate("x < 0", sys);
  ICSet ics = sample_ics(InitRegion::parse("x=-1.001..1.001, y=-1.001..1.001, z=21.999..22.001"),
                         static_cast<std::size_t>(state.range(0)), 1);
  BoundaryParams bp;
  bp.t_final = 16.0;
  bp.cfg.h = 0.02;
  bp.seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(boxcount(sys, ics, p, 2e-7, bp).n_boundary);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 3);
}
BENCHMARK(BM_BoxcountLorenz)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace chaoscope
