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
#include <filesystem>
#include <string>
#include <vector>

namespace chaoscope::detail {

struct ShellResult {
  int exit_code;  // 127 when the shell could not find the command
  std::string output;  // stdout and stderr interleaved
};

ShellResult run_shell(const std::string& command);

struct SpawnResult {
  bool timed_out = false;
  bool signaled = false;
  int exit_code = 0;
  std::string stderr_text;
};

// Runs argv[0] with argv directly (no shell), stdout discarded, stderr
// captured through stderr_path. Kills the child after timeout.
SpawnResult spawn_and_wait(const std::vector<std::string>& argv,
                           const std::filesystem::path& stderr_path,
                           std::chrono::milliseconds timeout);

std::string shell_quote(const std::string& s);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& body);

}  // namespace chaoscope::detail
