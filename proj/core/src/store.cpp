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

#include "chaoscope/store.hpp"

#include <fcntl.h>
#include <linux/fs.h>
#include <sys/syscall.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <random>
#include <sstream>

#include "chaoscope/error.hpp"
#include "json_io.hpp"
#include "process.hpp"

namespace fs = std::filesystem;

namespace chaoscope {
namespace {

constexpr const char* kManifestFile = "manifest.json";

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec == std::errc::result_out_of_range) {
    std::string tmp(s);
    out = std::strtod(tmp.c_str(), nullptr);
    return true;
  }
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

bool valid_run_id(const std::string& id) {
  if (id.empty() || id.size() > 128 || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
}

std::string ics_to_csv(const ICSet& ics) {
  std::string out = "index";
  for (const auto& a : ics.region.ranges()) out += "," + a.var;
  out += "\n";
  for (std::size_t i = 0; i < ics.points.size(); ++i) {
    out += std::to_string(i);
    for (double v : ics.points[i]) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

void write_or_throw(const fs::path& p, const std::string& body) {
  try {
    detail::write_file(p, body);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::kIo, "cannot write " + p.string() + ": " + e.what());
  }
}

// Renames staging into target, failing if target exists.
void publish(const fs::path& staging, const fs::path& target) {
  if (::syscall(SYS_renameat2, AT_FDCWD, staging.c_str(), AT_FDCWD, target.c_str(),
                RENAME_NOREPLACE) == 0) {
    return;
  }
  int err = errno;
  if (err == EEXIST || err == ENOTEMPTY) {
    fs::remove_all(staging);
    throw Error(Errc::kDuplicate, "run id already exists: " + target.filename().string());
  }
  if (err == ENOSYS || err == EINVAL) {
    // Filesystems without renameat2 support: mkdir reserves the name.
    std::error_code ec;
    if (!fs::create_directory(target, ec)) {
      fs::remove_all(staging);
      throw Error(Errc::kDuplicate, "run id already exists: " + target.filename().string());
    }
    fs::rename(staging, target, ec);
    if (!ec) return;
    err = ec.value();
  }
  fs::remove_all(staging);
  throw Error(Errc::kIo, "cannot publish run " + target.filename().string() + ": " +
                             std::strerror(err));
}

}  // namespace

IntegratorConfig RunManifest::integrator_config() const {
  IntegratorConfig cfg;
  cfg.h = h;
  cfg.t0 = t0;
  cfg.t1 = t1;
  cfg.sample_stride = sample_stride;
  if (method == "plugin") {
    PluginSpec spec;
    spec.compile_command = compile_command.empty() ? kDefaultCompileCommand : compile_command;
    cfg.method = spec;
  } else if (method != "native") {
    throw Error(Errc::kValidation, "unknown method '" + method + "'");
  }
  return cfg;
}

bool manifests_equal(const RunManifest& a, const RunManifest& b) {
  return to_json(a) == to_json(b);
}

std::string new_run_id() {
  static std::atomic<unsigned> counter{0};
  auto now = std::chrono::system_clock::now();
  std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%S", &tm);
  std::random_device rd;
  std::uint64_t salt = (static_cast<std::uint64_t>(rd()) << 32) ^ rd() ^
                       (static_cast<std::uint64_t>(::getpid()) << 16) ^ counter.fetch_add(1);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s-%012llx", stamp,
                static_cast<unsigned long long>(salt & 0xffffffffffffULL));
  return buf;
}

std::string utc_timestamp_now() {
  auto now = std::chrono::system_clock::now();
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03lldZ", buf, static_cast<long long>(ms));
  return out;
}

std::string trajectory_to_csv(const Trajectory& traj, const std::vector<std::string>& vars) {
  std::string out = "t";
  for (const auto& v : vars) out += "," + v;
  out += "\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out += format_double(traj.times[i]);
    for (double v : traj.states[i]) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

Trajectory trajectory_from_csv(const std::string& text, std::size_t dimension,
                               const std::string& name_for_errors) {
  Trajectory traj;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != dimension + 1) {
      throw Error(Errc::kIntegrity, name_for_errors + ":" + std::to_string(lineno) + ": expected " +
                                        std::to_string(dimension + 1) + " fields, found " +
                                        std::to_string(fields.size()));
    }
    if (header) {
      header = false;
      if (fields[0] != "t") {
        throw Error(Errc::kIntegrity, name_for_errors + ":1: header must start with 't'");
      }
      continue;
    }
    std::vector<double> row(dimension);
    double t = 0.0;
    for (std::size_t f = 0; f < fields.size(); ++f) {
      double v = 0.0;
      if (!parse_double(fields[f], v)) {
        throw Error(Errc::kIntegrity, name_for_errors + ":" + std::to_string(lineno) + ": field " +
                                          std::to_string(f + 1) + " is not a number");
      }
      if (f == 0) {
        t = v;
      } else {
        row[f - 1] = v;
      }
    }
    traj.times.push_back(t);
    traj.states.push_back(std::move(row));
  }
  if (header) throw Error(Errc::kIntegrity, name_for_errors + ": missing header");
  return traj;
}

std::string to_json_text(const BoxcountResult& r) { return to_json(r).dump(2) + "\n"; }
std::string to_json_text(const FdimResult& r) { return to_json(r).dump(2) + "\n"; }
std::string to_json_text(const RunManifest& m) { return to_json(m).dump(2) + "\n"; }
std::string to_json_text(const InitRegion& r) { return to_json(r).dump(2) + "\n"; }

namespace {
Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::kSyntax, what + ": " + e.what());
  }
}
}  // namespace

BoxcountResult boxcount_from_json_text(const std::string& text) {
  return boxcount_from_json(parse_json(text, "boxcount result"));
}
FdimResult fdim_from_json_text(const std::string& text) {
  return fdim_from_json(parse_json(text, "fdim result"));
}
RunManifest manifest_from_json_text(const std::string& text) {
  return manifest_from_json(parse_json(text, "manifest"));
}
InitRegion region_from_json_text(const std::string& text) {
  return region_from_json(parse_json(text, "region"));
}

std::string fdim_points_csv(const FdimResult& r) {
  std::string out = "delta,fraction\n";
  for (const auto& p : r.points) {
    out += format_double(p.delta) + "," + format_double(p.fraction) + "\n";
  }
  return out;
}

// ---- StoredRun ----

std::string StoredRun::read_file(const std::string& name) const {
  fs::path p = dir_ / name;
  if (!fs::exists(p)) {
    throw Error(Errc::kIntegrity, "run " + manifest_.run_id + ": missing file " + name);
  }
  try {
    return detail::read_file(p);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::kIo, "run " + manifest_.run_id + ": cannot read " + name + ": " + e.what());
  }
}

Trajectory StoredRun::trajectory(std::size_t i) const {
  if (i >= manifest_.trajectories.size()) {
    throw Error(Errc::kNotFound, "run " + manifest_.run_id + " has no trajectory " + std::to_string(i));
  }
  const auto& e = manifest_.trajectories[i];
  Trajectory t = trajectory_from_csv(read_file(e.file), manifest_.region.dimension(), e.file);
  if (t.times.size() != e.samples) {
    throw Error(Errc::kIntegrity, e.file + ": expected " + std::to_string(e.samples) +
                                      " samples, found " + std::to_string(t.times.size()));
  }
  t.ic_index = e.ic_index;
  if (!e.completed) t.status = Failed{e.reason, e.last_good_time};
  return t;
}

std::optional<BoxcountResult> StoredRun::boxcount() const {
  if (!fs::exists(dir_ / "boxcount.json")) return std::nullopt;
  return boxcount_from_json_text(read_file("boxcount.json"));
}

std::optional<FdimResult> StoredRun::fdim() const {
  if (!fs::exists(dir_ / "fdim.json")) return std::nullopt;
  return fdim_from_json_text(read_file("fdim.json"));
}

std::optional<std::vector<std::vector<double>>> StoredRun::initial_conditions() const {
  if (!fs::exists(dir_ / "ics.csv")) return std::nullopt;
  std::string text = read_file("ics.csv");
  // Same layout as a trajectory file with "index" in place of "t".
  if (text.rfind("index,", 0) != 0) throw Error(Errc::kIntegrity, "ics.csv: bad header");
  Trajectory rows = trajectory_from_csv("t" + text.substr(5), manifest_.region.dimension(), "ics.csv");
  return rows.states;
}

// ---- Store ----

Store::Store(fs::path root) : root_(std::move(root)) {}

fs::path Store::default_root() {
  if (const char* env = std::getenv("CHAOSCOPE_STORE"); env && *env) return fs::path(env);
  return fs::path("chaoscope-store");
}

std::string Store::save_run(RunManifest manifest, std::span<const Trajectory> trajectories,
                            const RunResults& results) const {
  if (manifest.run_id.empty()) manifest.run_id = new_run_id();
  if (!valid_run_id(manifest.run_id)) {
    throw Error(Errc::kValidation, "invalid run id '" + manifest.run_id + "'");
  }
  if (manifest.created_at.empty()) manifest.created_at = utc_timestamp_now();

  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw Error(Errc::kIo, "cannot create store root " + root_.string() + ": " + ec.message());
  fs::path target = root_ / manifest.run_id;
  if (fs::exists(target)) throw Error(Errc::kDuplicate, "run id already exists: " + manifest.run_id);

  fs::path staging = root_ / (".staging-" + manifest.run_id + "-" + new_run_id());
  if (!fs::create_directory(staging, ec) || ec) {
    throw Error(Errc::kIo, "cannot create " + staging.string() + ": " + ec.message());
  }
  try {
    std::vector<std::string> vars;
    for (const auto& a : manifest.region.ranges()) vars.push_back(a.var);

    manifest.trajectories.clear();
    for (const auto& traj : trajectories) {
      TrajectoryEntry e;
      e.ic_index = traj.ic_index;
      e.file = "ic_" + std::to_string(traj.ic_index) + ".csv";
      e.samples = traj.times.size();
      if (const auto* f = std::get_if<Failed>(&traj.status)) {
        e.completed = false;
        e.reason = f->reason;
        e.last_good_time = f->last_good_time;
      }
      write_or_throw(staging / e.file, trajectory_to_csv(traj, vars));
      manifest.trajectories.push_back(std::move(e));
    }

    std::vector<std::string> refs;
    if (results.ics) {
      write_or_throw(staging / "ics.csv", ics_to_csv(*results.ics));
      refs.push_back("ics.csv");
    }
    if (results.boxcount) {
      write_or_throw(staging / "boxcount.json", to_json_text(*results.boxcount));
      refs.push_back("boxcount.json");
    }
    if (results.fdim) {
      write_or_throw(staging / "fdim.json", to_json_text(*results.fdim));
      write_or_throw(staging / "fdim_points.csv", fdim_points_csv(*results.fdim));
      refs.push_back("fdim.json");
      refs.push_back("fdim_points.csv");
    }
    for (const auto& r : manifest.result_refs) {
      if (std::find(refs.begin(), refs.end(), r) == refs.end()) {
        throw Error(Errc::kIntegrity, "result_ref '" + r + "' has no content to write");
      }
    }
    manifest.result_refs = refs;
    write_or_throw(staging / kManifestFile, to_json_text(manifest));
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
  publish(staging, target);
  return manifest.run_id;
}

StoredRun Store::load_run(const std::string& run_id) const {
  if (!valid_run_id(run_id)) throw Error(Errc::kNotFound, "no such run: " + run_id);
  fs::path dir = root_ / run_id;
  if (!fs::is_directory(dir)) throw Error(Errc::kNotFound, "no such run: " + run_id);
  fs::path mpath = dir / kManifestFile;
  if (!fs::exists(mpath)) throw Error(Errc::kIntegrity, "run " + run_id + ": missing manifest.json");
  RunManifest m;
  try {
    m = manifest_from_json_text(detail::read_file(mpath));
  } catch (const Error& e) {
    throw Error(Errc::kIntegrity, "run " + run_id + ": corrupt manifest.json: " + e.what());
  }
  if (m.run_id != run_id) {
    throw Error(Errc::kIntegrity, "run " + run_id + ": manifest.json names run '" + m.run_id + "'");
  }
  for (const auto& ref : m.result_refs) {
    if (!fs::exists(dir / ref)) {
      throw Error(Errc::kIntegrity, "run " + run_id + ": result_ref '" + ref + "' is missing");
    }
  }
  return StoredRun(std::move(m), std::move(dir));
}

std::vector<RunSummary> Store::list_runs() const {
  std::vector<RunSummary> out;
  std::error_code ec;
  if (!fs::is_directory(root_, ec)) return out;
  for (const auto& entry : fs::directory_iterator(root_, ec)) {
    if (!entry.is_directory()) continue;
    std::string name = entry.path().filename().string();
    if (!valid_run_id(name)) continue;
    fs::path mpath = entry.path() / kManifestFile;
    if (!fs::exists(mpath)) continue;
    try {
      Json j = Json::parse(detail::read_file(mpath));
      out.push_back({required<std::string>(j, "run_id"), required<std::string>(j, "created_at"),
                     required<std::string>(j, "system_name"), required<std::string>(j, "kind")});
    } catch (const std::exception&) {
      continue;
    }
  }
  std::sort(out.begin(), out.end(), [](const RunSummary& a, const RunSummary& b) {
    if (a.created_at != b.created_at) return a.created_at > b.created_at;
    return a.run_id > b.run_id;
  });
  return out;
}

}  // namespace chaoscope
