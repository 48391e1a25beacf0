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
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "chaoscope/sysdsl.hpp"

namespace chaoscope::testing {

// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> n{0};
    path_ = std::filesystem::temp_directory_path() /
            ("chaoscope-test-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  out << body;
}

inline std::string system_path(const std::string& name) {
  return std::string(CHAOSCOPE_SYSTEMS_DIR) + "/" + name;
}

inline SystemDef load_system(const std::string& file) {
  return parse_system(read_text(system_path(file)),
                      std::filesystem::path(file).stem().string());
}

inline const char* kLorenz =
    "param sigma = 10\n"
    "param b = 8/3\n"
    "param R = 28\n"
    "diff(x(t),t) = sigma*(y(t)-x(t))\n"
    "diff(y(t),t) = -x(t)*z(t) + R*x(t) - y(t)\n"
    "diff(z(t),t) = x(t)*y(t) - b*z(t)\n";

}  // namespace chaoscope::testing
