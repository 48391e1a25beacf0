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

#include "json_io.hpp"

#include "chaoscope/error.hpp"

namespace chaoscope {

Json to_json(const InitRegion& r) {
  Json ranges = Json::array();
  for (const auto& a : r.ranges()) ranges.push_back({{"var", a.var}, {"lo", a.lo}, {"hi", a.hi}});
  return Json{{"ranges", ranges}};
}

InitRegion region_from_json(const Json& j) {
  const Json* arr = &j;
  if (j.is_object()) {
    if (!j.contains("ranges")) throw Error(Errc::kValidation, "missing field 'ranges'");
    arr = &j.at("ranges");
  }
  if (!arr->is_array()) throw Error(Errc::kValidation, "region 'ranges' must be an array");
  std::vector<AxisRange> ranges;
  for (const auto& a : *arr) {
    ranges.push_back({required<std::string>(a, "var"), required<double>(a, "lo"),
                      required<double>(a, "hi")});
  }
  return InitRegion(std::move(ranges));
}

Json to_json(const BoxcountResult& r) {
  return Json{{"epsilon", r.epsilon},       {"delta", r.delta},
              {"n_testable", r.n_testable}, {"n_boundary", r.n_boundary},
              {"n_excluded", r.n_excluded}, {"fraction", r.fraction()}};
}

BoxcountResult boxcount_from_json(const Json& j) {
  BoxcountResult r;
  r.epsilon = required<double>(j, "epsilon");
  r.delta = required<double>(j, "delta");
  r.n_testable = required<std::size_t>(j, "n_testable");
  r.n_boundary = required<std::size_t>(j, "n_boundary");
  r.n_excluded = required<std::size_t>(j, "n_excluded");
  return r;
}

Json to_json(const FdimResult& r) {
  Json points = Json::array();
  for (const auto& p : r.points) {
    points.push_back({{"epsilon", p.epsilon},
                      {"delta", p.delta},
                      {"fraction", p.fraction},
                      {"n_testable", p.n_testable},
                      {"n_boundary", p.n_boundary},
                      {"n_excluded", p.n_excluded},
                      {"used", p.used}});
  }
  return Json{{"D", r.D},
              {"alpha", r.alpha},
              {"d_B", r.d_B},
              {"se_percent", r.se_percent},
              {"se_slope", r.se_slope},
              {"pearson_r", r.pearson_r},
              {"intercept", r.intercept},
              {"points", points}};
}

FdimResult fdim_from_json(const Json& j) {
  FdimResult r;
  r.D = required<std::size_t>(j, "D");
  r.alpha = required<double>(j, "alpha");
  r.d_B = required<double>(j, "d_B");
  r.se_percent = required<double>(j, "se_percent");
  r.se_slope = required<double>(j, "se_slope");
  r.pearson_r = required<double>(j, "pearson_r");
  r.intercept = required<double>(j, "intercept");
  for (const auto& p : required<Json>(j, "points")) {
    FdimPoint pt;
    pt.epsilon = required<double>(p, "epsilon");
    pt.delta = required<double>(p, "delta");
    pt.fraction = required<double>(p, "fraction");
    pt.n_testable = required<std::size_t>(p, "n_testable");
    pt.n_boundary = required<std::size_t>(p, "n_boundary");
    pt.n_excluded = required<std::size_t>(p, "n_excluded");
    pt.used = required<bool>(p, "used");
    r.points.push_back(pt);
  }
  return r;
}

Json to_json(const RunManifest& m) {
  Json trajs = Json::array();
  for (const auto& t : m.trajectories) {
    Json e{{"ic_index", t.ic_index},
           {"file", t.file},
           {"samples", t.samples},
           {"status", t.completed ? "completed" : "failed"}};
    if (!t.completed) {
      e["reason"] = t.reason;
      e["last_good_time"] = t.last_good_time;
    }
    trajs.push_back(std::move(e));
  }
  Json cfg{{"method", m.method},
           {"h", m.h},
           {"t0", m.t0},
           {"t1", m.t1},
           {"sample_stride", m.sample_stride}};
  if (m.method == "plugin") cfg["compile_command"] = m.compile_command;
  return Json{{"run_id", m.run_id},
              {"created_at", m.created_at},
              {"kind", m.kind},
              {"system_name", m.system_name},
              {"system_source", m.system_source},
              {"predicate_source", m.predicate_source},
              {"region", to_json(m.region)},
              {"cfg", cfg},
              {"seed", m.seed},
              {"number_ic", m.number_ic},
              {"options", m.options},
              {"result_refs", m.result_refs},
              {"trajectories", trajs}};
}

RunManifest manifest_from_json(const Json& j) {
  RunManifest m;
  m.run_id = required<std::string>(j, "run_id");
  m.created_at = required<std::string>(j, "created_at");
  m.kind = required<std::string>(j, "kind");
  m.system_name = required<std::string>(j, "system_name");
  m.system_source = required<std::string>(j, "system_source");
  m.predicate_source = required<std::string>(j, "predicate_source");
  m.region = region_from_json(required<Json>(j, "region"));
  const Json cfg = required<Json>(j, "cfg");
  m.method = required<std::string>(cfg, "method");
  m.h = required<double>(cfg, "h");
  m.t0 = required<double>(cfg, "t0");
  m.t1 = required<double>(cfg, "t1");
  m.sample_stride = required<std::size_t>(cfg, "sample_stride");
  if (cfg.contains("compile_command")) m.compile_command = required<std::string>(cfg, "compile_command");
  m.seed = required<std::uint64_t>(j, "seed");
  m.number_ic = required<std::size_t>(j, "number_ic");
  m.options = required<std::map<std::string, double>>(j, "options");
  m.result_refs = required<std::vector<std::string>>(j, "result_refs");
  for (const auto& e : required<Json>(j, "trajectories")) {
    TrajectoryEntry t;
    t.ic_index = required<std::size_t>(e, "ic_index");
    t.file = required<std::string>(e, "file");
    t.samples = required<std::size_t>(e, "samples");
    t.completed = required<std::string>(e, "status") == "completed";
    if (!t.completed) {
      t.reason = required<std::string>(e, "reason");
      t.last_good_time = required<double>(e, "last_good_time");
    }
    m.trajectories.push_back(std::move(t));
  }
  return m;
}

}  // namespace chaoscope
