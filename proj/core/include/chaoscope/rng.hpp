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

#include <cstdint>
#include <random>

namespace chaoscope {

// Independent random stream keyed by (seed, purpose, index, copy). Streams
// depend only on the key, never on scheduling, so ensembles are reproducible
// for any worker count.
class StreamRng {
 public:
  enum class Purpose : std::uint32_t { kInitialCondition = 1, kPerturbation = 2 };

  StreamRng(std::uint64_t seed, Purpose purpose, std::uint64_t index, std::uint64_t copy = 0);

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace chaoscope
