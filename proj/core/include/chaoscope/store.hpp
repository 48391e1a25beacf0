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
#include <span>
#include <string>
#include <vector>

#include "chaoscope/boundary.hpp"
#include "chaoscope/integrate.hpp"

namespace chaoscope {

struct TrajectoryEntry {
  std::size_t ic_index = 0;
  std::string file;  // ic_<index>.csv
  std::size_t samples = 0;
  bool completed = true;
  std::string reason;
  double last_good_time = 0.0;
};

struct RunManifest {
  std::string run_id;      // assigned by save_run when empty
  std::string created_at;  // ISO-8601 UTC, assigned by save_run when empty
  std::string kind;        // solve | boxcount | fdim
  std::string system_name;
  std::string system_source;
  std::string predicate_source;
  InitRegion region;
  std::string method = "native";  // native | plugin
  std::string compile_command;    // plugin only
  double h = 0.0;
  double t0 = 0.0;
  double t1 = 0.0;
  std::size_t sample_stride = 1;
  std::uint64_t seed = 0;
  std::size_t number_ic = 0;
  // Command-specific numeric settings (epsilon, eps_lo, eps_hi, n_epsilons,
  // k, final_time).
  std::map<std::string, double> options;
  std::vector<std::string> result_refs;
  std::vector<TrajectoryEntry> trajectories;

  IntegratorConfig integrator_config() const;
};

bool manifests_equal(const RunManifest& a, const RunManifest& b);

struct RunResults {
  std::optional<BoxcountResult> boxcount;
  std::optional<FdimResult> fdim;
  std::optional<ICSet> ics;
};

struct RunSummary {
  std::string run_id;
  std::string created_at;
  std::string system_name;
  std::string kind;
};

// A persisted run. Trajectories are read from disk on demand.
class StoredRun {
 public:
  StoredRun(RunManifest manifest, std::filesystem::path dir)
      : manifest_(std::move(manifest)), dir_(std::move(dir)) {}

  const RunManifest& manifest() const { return manifest_; }
  const std::filesystem::path& directory() const { return dir_; }

  std::size_t trajectory_count() const { return manifest_.trajectories.size(); }
  // Reads ic_<index>.csv for the i-th stored trajectory.
  Trajectory trajectory(std::size_t i) const;

  std::optional<BoxcountResult> boxcount() const;
  std::optional<FdimResult> fdim() const;
  std::optional<std::vector<std::vector<double>>> initial_conditions() const;
  std::string read_file(const std::string& name) const;

 private:
  RunManifest manifest_;
  std::filesystem::path dir_;
};

// One directory per run under a root. Writes are staged in a hidden
// directory and renamed into place, so readers never see partial runs.
class Store {
 public:
  explicit Store(std::filesystem::path root);

  // $CHAOSCOPE_STORE if set, else ./chaoscope-store.
  static std::filesystem::path default_root();

  const std::filesystem::path& root() const { return root_; }

  std::string save_run(RunManifest manifest, std::span<const Trajectory> trajectories,
                       const RunResults& results = {}) const;
  StoredRun load_run(const std::string& run_id) const;
  // Newest first; directories without a readable manifest are skipped.
  std::vector<RunSummary> list_runs() const;

 private:
  std::filesystem::path root_;
};

std::string new_run_id();
std::string utc_timestamp_now();

// ---- text formats shared by the store, CLI and service ----

std::string trajectory_to_csv(const Trajectory& traj, const std::vector<std::string>& vars);
Trajectory trajectory_from_csv(const std::string& text, std::size_t dimension,
                               const std::string& name_for_errors);

std::string to_json_text(const BoxcountResult& r);
std::string to_json_text(const FdimResult& r);
std::string to_json_text(const RunManifest& m);
std::string to_json_text(const InitRegion& r);
BoxcountResult boxcount_from_json_text(const std::string& text);
FdimResult fdim_from_json_text(const std::string& text);
RunManifest manifest_from_json_text(const std::string& text);
InitRegion region_from_json_text(const std::string& text);

// "delta,fraction" with a header row.
std::string fdim_points_csv(const FdimResult& r);

}  // namespace chaoscope
