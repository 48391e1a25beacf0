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

#include <fstream>
#include <sstream>
#include <string>

#include "chaoscope/sysdsl.hpp"

namespace chaoscope::bench {

inline SystemDef lorenz() {
  std::ifstream in(std::string(CHAOSCOPE_SYSTEMS_DIR) + "/lorenz.sys");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_system(ss.str(), "lorenz");
}

}  // namespace chaoscope::bench
