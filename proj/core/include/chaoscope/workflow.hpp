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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chaoscope/boundary.hpp"
#include "chaoscope/ensemble.hpp"
#include "chaoscope/store.hpp"

namespace chaoscope {

// One solve/boxcount/fdim invocation, shared by the CLI flags, the CLI
// config file and the service job payload. Field names follow the JSON keys.
struct RunRequest {
  std::string kind;           // solve | boxcount | fdim
  std::string system_name = "system";
  std::string system_source;
  std::map<std::string, double> params;  // overrides of declared parameters
  std::string predicate;
  std::optional<InitRegion> region;
  double t0 = 0.0;  // t_range, solve only
  double t1 = 0.0;
  double t_calc_step = 0.01;
  std::optional<double> t_plot_step;  // defaults to t_calc_step
  std::size_t number_ic = 8;
  std::uint64_t seed = 1;
  double epsilon = 0.0;  // boxcount
  double eps_lo = 0.0;   // fdim
  double eps_hi = 0.0;
  std::size_t n_epsilons = 0;
  double final_time = 0.0;  // boxcount, fdim
  std::size_t k = 2;
  std::string method = "native";
  std::string compile_command = kDefaultCompileCommand;
};

// Parses a JSON object. "system" carries source text; "system_file" names
// a file to read instead, relative to file_base. Without a file_base (as for
// network payloads) "system_file" is rejected. "region" is either the
// InitRegion JSON form or the "x=lo..hi, ..." text form. Throws
// Error(kValidation) or kSyntax.
RunRequest request_from_json_text(const std::string& text,
                                  const std::optional<std::filesystem::path>& file_base = std::nullopt);
std::string request_to_json_text(const RunRequest& req);

// A request checked against its system, ready to run.
struct PreparedRun {
  RunRequest request;
  SystemDef system;
  std::optional<Predicate> predicate;
  InitRegion region;
  IntegratorConfig cfg;  // solve: t_range; boundary: [0, final_time]
};

// All flag-combination and range checks happen here, before any
// integration starts. Throws Error(kValidation) and parse errors.
PreparedRun prepare(const RunRequest& req);

struct WorkflowResult {
  std::string run_id;
  std::string kind;
  std::size_t trajectories = 0;
  std::size_t failed = 0;
  std::optional<BoxcountResult> boxcount;
  std::optional<FdimResult> fdim;
  double wall_seconds = 0.0;
};

// Runs the prepared request and saves it. The plugin, when selected, is
// built in a temporary directory that is removed afterwards.
WorkflowResult execute(const PreparedRun& run, const Store& store, const RunControl& control = {},
                       std::vector<Trajectory>* trajectories_out = nullptr);

// Manifest stored for a prepared run (without run_id, created_at and
// trajectory entries).
RunManifest manifest_for(const PreparedRun& run);

// Reconstructs the request that produced a stored manifest.
RunRequest request_from_manifest(const RunManifest& m);

}  // namespace chaoscope
