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

#include "chaoscope/rng.hpp"

namespace chaoscope {

namespace {

std::mt19937_64 keyed_engine(std::uint64_t seed, std::uint32_t purpose, std::uint64_t index,
                             std::uint64_t copy) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), purpose, lo(index), hi(index), lo(copy), hi(copy)};
  return std::mt19937_64(seq);
}

}  // namespace

StreamRng::StreamRng(std::uint64_t seed, Purpose purpose, std::uint64_t index, std::uint64_t copy)
    : engine_(keyed_engine(seed, static_cast<std::uint32_t>(purpose), index, copy)) {}

}  // namespace chaoscope
