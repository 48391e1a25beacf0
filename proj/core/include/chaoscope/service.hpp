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

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>

namespace chaoscope {

struct ServiceConfig {
  std::filesystem::path store_root;
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::size_t workers = 1;
  std::string cors_origin = "*";
};

// HTTP/JSON facade over the store and the run workflow. Jobs run one at a
// time on a background executor, each using up to `workers` threads.
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds the listening socket; throws Error(kBind) on failure.
  void bind();
  int port() const;

  // Serves until stop(). bind() must have been called.
  void serve();
  // bind() plus serve() on a background thread.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace chaoscope
