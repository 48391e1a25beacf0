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

#include <vector>

#include <benchmark/benchmark.h>

#include "bench_util.hpp"
#include "chaoscope/sysdsl.hpp"

namespace chaoscope {
namespace {

const std::vector<double> kPoint = {1.0, 2.0, 3.0};

// Tree walk, the reference evaluator.
void BM_EvalRhsTree(benchmark::State& state) {
  SystemDef sys = bench::lorenz();
  for (auto _ : state) benchmark::DoNotOptimize(eval_rhs(sys, 0.0, kPoint));
}
BENCHMARK(BM_EvalRhsTree);

// Flattened programs used by the integrator.
void BM_EvalRhsCompiled(benchmark::State& state) {
  SystemDef sys = bench::lorenz();
  CompiledSystem rhs(sys);
  double out[3];
  std::size_t bad = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rhs.eval(0.0, kPoint.data(), out, &bad));
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_EvalRhsCompiled);

void BM_ParseLorenz(benchmark::State& state) {
  SystemDef sys = bench::lorenz();
  std::string src = pretty_print(sys);
  for (auto _ : state) benchmark::DoNotOptimize(parse_system(src).dimension());
}
BENCHMARK(BM_ParseLorenz);

}  // namespace
}  // namespace chaoscope
