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

#include <atomic>
#include <cstddef>
#include <functional>

namespace chaoscope {

// Execution knobs shared by every ensemble operation. None of them affect
// numerical results.
struct RunControl {
  std::size_t workers = 1;
  // Called with (completed, total) after each finished task; may be called
  // from worker threads.
  std::function<void(std::size_t, std::size_t)> progress;
  // Polled between tasks; when set the operation throws Error(kCanceled).
  const std::atomic<bool>* cancel = nullptr;
};

// Runs task(i, worker) for i in [0, count) on up to
// worker_count(control, count) threads; worker < that bound. Tasks
// write to disjoint slots, so the result does not depend on scheduling. The
// first exception thrown by a task is rethrown after all threads join.
void parallel_for(std::size_t count, const RunControl& control,
                  const std::function<void(std::size_t, std::size_t)>& task);

std::size_t worker_count(const RunControl& control, std::size_t count);

}  // namespace chaoscope
