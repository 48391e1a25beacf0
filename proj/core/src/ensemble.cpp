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

#include "chaoscope/ensemble.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "chaoscope/error.hpp"

namespace chaoscope {

std::size_t worker_count(const RunControl& control, std::size_t count) {
  return std::clamp<std::size_t>(control.workers, 1, std::max<std::size_t>(count, 1));
}

void parallel_for(std::size_t count, const RunControl& control,
                  const std::function<void(std::size_t, std::size_t)>& task) {
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::atomic<bool> stop{false};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&](std::size_t id) {
    for (;;) {
      if (stop.load(std::memory_order_relaxed)) return;
      if (control.cancel && control.cancel->load(std::memory_order_relaxed)) {
        stop = true;
        return;
      }
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        task(i, id);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        stop = true;
        return;
      }
      const std::size_t finished = done.fetch_add(1) + 1;
      if (control.progress) control.progress(finished, count);
    }
  };

  const std::size_t threads = worker_count(control, count);
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker, t);
  }
  if (failure) std::rethrow_exception(failure);
  if (control.cancel && control.cancel->load()) {
    throw Error(Errc::kCanceled, "operation canceled");
  }
}

}  // namespace chaoscope
