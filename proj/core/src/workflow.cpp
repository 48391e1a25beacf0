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

#include "chaoscope/workflow.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <memory>

#include "chaoscope/error.hpp"
#include "json_io.hpp"
#include "process.hpp"

namespace fs = std::filesystem;

namespace chaoscope {
namespace {

const char* const kKnownKeys[] = {
    "kind",         "system",    "system_file", "system_name", "params",     "predicate",
    "region",       "t_range",   "t_calc_step", "t_plot_step", "number_ic",  "seed",
    "epsilon",      "epsilon_range", "n_epsilons", "final_time", "k",        "method",
    "compile_command"};

std::pair<double, double> pair_field(const Json& j, const char* key) {
  const Json v = required<Json>(j, key);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw Error(Errc::kValidation, std::string("field '") + key + "' must be a [lo, hi] pair");
}

std::size_t count_field(const Json& j, const char* key) {
  const Json v = required<Json>(j, key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw Error(Errc::kValidation, std::string("field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

// Stride from the plot and calc steps; they must divide.
std::size_t plot_stride(double calc, double plot) {
  if (!(plot > 0.0) || !std::isfinite(plot)) {
    throw Error(Errc::kValidation, "t_plot_step must be positive");
  }
  const double ratio = plot / calc;
  const double n = std::round(ratio);
  if (n < 1.0 || std::fabs(ratio - n) > 1e-9 * ratio) {
    throw Error(Errc::kValidation, "t_plot_step must be a positive integer multiple of t_calc_step");
  }
  return static_cast<std::size_t>(n);
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(Errc::kValidation, std::string(what) + " must be positive and finite");
  }
}

}  // namespace

RunRequest request_from_json_text(const std::string& text,
                                  const std::optional<fs::path>& file_base) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::kSyntax, std::string("request is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(Errc::kValidation, "request must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(kKnownKeys), std::end(kKnownKeys), key) == std::end(kKnownKeys)) {
      throw Error(Errc::kValidation, "unknown field '" + key + "'");
    }
  }

  RunRequest r;
  if (j.contains("kind")) r.kind = required<std::string>(j, "kind");
  if (j.contains("system") && j.contains("system_file")) {
    throw Error(Errc::kValidation, "give either 'system' or 'system_file', not both");
  }
  if (j.contains("system")) r.system_source = required<std::string>(j, "system");
  if (j.contains("system_file")) {
    if (!file_base) throw Error(Errc::kValidation, "'system_file' is only accepted in config files");
    fs::path p = required<std::string>(j, "system_file");
    if (p.is_relative()) p = *file_base / p;
    try {
      r.system_source = detail::read_file(p);
    } catch (const std::exception& e) {
      throw Error(Errc::kIo, "cannot read system file " + p.string() + ": " + e.what());
    }
    r.system_name = p.stem().string();
  }
  if (j.contains("system_name")) r.system_name = required<std::string>(j, "system_name");
  if (j.contains("params")) r.params = required<std::map<std::string, double>>(j, "params");
  if (j.contains("predicate")) r.predicate = required<std::string>(j, "predicate");
  if (j.contains("region")) {
    const Json& reg = j.at("region");
    r.region = reg.is_string() ? InitRegion::parse(reg.get<std::string>()) : region_from_json(reg);
  }
  if (j.contains("t_range")) std::tie(r.t0, r.t1) = pair_field(j, "t_range");
  if (j.contains("t_calc_step")) r.t_calc_step = required<double>(j, "t_calc_step");
  if (j.contains("t_plot_step")) r.t_plot_step = required<double>(j, "t_plot_step");
  if (j.contains("number_ic")) r.number_ic = count_field(j, "number_ic");
  if (j.contains("seed")) r.seed = count_field(j, "seed");
  if (j.contains("epsilon")) r.epsilon = required<double>(j, "epsilon");
  if (j.contains("epsilon_range")) std::tie(r.eps_lo, r.eps_hi) = pair_field(j, "epsilon_range");
  if (j.contains("n_epsilons")) r.n_epsilons = count_field(j, "n_epsilons");
  if (j.contains("final_time")) r.final_time = required<double>(j, "final_time");
  if (j.contains("k")) r.k = count_field(j, "k");
  if (j.contains("method")) r.method = required<std::string>(j, "method");
  if (j.contains("compile_command")) r.compile_command = required<std::string>(j, "compile_command");
  return r;
}

std::string request_to_json_text(const RunRequest& r) {
  Json j{{"kind", r.kind},
         {"system", r.system_source},
         {"system_name", r.system_name},
         {"params", r.params},
         {"number_ic", r.number_ic},
         {"seed", r.seed},
         {"t_calc_step", r.t_calc_step},
         {"method", r.method}};
  if (!r.predicate.empty()) j["predicate"] = r.predicate;
  if (r.region) j["region"] = to_json(*r.region);
  if (r.method == "plugin") j["compile_command"] = r.compile_command;
  if (r.kind == "solve") {
    j["t_range"] = {r.t0, r.t1};
    if (r.t_plot_step) j["t_plot_step"] = *r.t_plot_step;
  } else {
    j["final_time"] = r.final_time;
    j["k"] = r.k;
    if (r.kind == "boxcount") j["epsilon"] = r.epsilon;
    if (r.kind == "fdim") {
      j["epsilon_range"] = {r.eps_lo, r.eps_hi};
      j["n_epsilons"] = r.n_epsilons;
    }
  }
  return j.dump(2) + "\n";
}

PreparedRun prepare(const RunRequest& req) {
  if (req.kind != "solve" && req.kind != "boxcount" && req.kind != "fdim") {
    throw Error(Errc::kValidation, "kind must be solve, boxcount or fdim");
  }
  if (req.system_source.empty()) throw Error(Errc::kValidation, "no system given");
  if (!req.region) throw Error(Errc::kValidation, "no init region given");
  if (req.method != "native" && req.method != "plugin") {
    throw Error(Errc::kValidation, "method must be native or plugin");
  }
  if (req.number_ic < 1) throw Error(Errc::kValidation, "number_ic must be at least 1");
  require_positive(req.t_calc_step, "t_calc_step");

  SystemDef sys = parse_system(req.system_source, req.system_name);
  for (const auto& [name, _] : req.params) {
    if (!sys.parameters().count(name)) {
      throw Error(Errc::kValidation, "system has no parameter '" + name + "'");
    }
  }
  if (!req.params.empty()) sys = sys.with_parameters(req.params);
  req.region->check_against(sys);

  std::optional<Predicate> pred;
  if (!req.predicate.empty()) pred = parse_predicate(req.predicate, sys);

  IntegratorConfig cfg;
  cfg.h = req.t_calc_step;
  if (req.method == "plugin") {
    if (req.compile_command.find_first_not_of(" \t") == std::string::npos) {
      throw Error(Errc::kValidation, "compile command is empty");
    }
    PluginSpec spec;
    spec.compile_command = req.compile_command;
    cfg.method = spec;
  }

  if (req.kind == "solve") {
    cfg.t0 = req.t0;
    cfg.t1 = req.t1;
    cfg.sample_stride = plot_stride(req.t_calc_step, req.t_plot_step.value_or(req.t_calc_step));
  } else {
    if (!pred) throw Error(Errc::kValidation, req.kind + " needs a predicate");
    if (req.k < 2) throw Error(Errc::kValidation, "k must be at least 2");
    require_positive(req.final_time, "final_time");
    cfg.t0 = 0.0;
    cfg.t1 = req.final_time;
    if (req.kind == "boxcount") {
      require_positive(req.epsilon, "epsilon");
    } else {
      require_positive(req.eps_lo, "epsilon range lower bound");
      require_positive(req.eps_hi, "epsilon range upper bound");
      if (!(req.eps_hi > req.eps_lo)) {
        throw Error(Errc::kValidation, "epsilon range must satisfy lo < hi");
      }
      if (req.n_epsilons < 2) throw Error(Errc::kValidation, "n_epsilons must be at least 2");
    }
  }
  cfg.validate();
  if (!(req.region->longest_edge() > 0.0) && req.kind != "solve") {
    throw Error(Errc::kValidation, "init region is degenerate");
  }

  return PreparedRun{req, std::move(sys), std::move(pred), *req.region, cfg};
}

RunManifest manifest_for(const PreparedRun& run) {
  const RunRequest& req = run.request;
  RunManifest m;
  m.kind = req.kind;
  m.system_name = run.system.name();
  m.system_source = pretty_print(run.system);
  m.predicate_source = req.predicate;
  m.region = run.region;
  m.method = req.method;
  if (req.method == "plugin") m.compile_command = req.compile_command;
  m.h = run.cfg.h;
  m.t0 = run.cfg.t0;
  m.t1 = run.cfg.t1;
  m.sample_stride = run.cfg.sample_stride;
  m.seed = req.seed;
  m.number_ic = req.number_ic;
  if (req.kind != "solve") {
    m.options["final_time"] = req.final_time;
    m.options["k"] = static_cast<double>(req.k);
  }
  if (req.kind == "boxcount") m.options["epsilon"] = req.epsilon;
  if (req.kind == "fdim") {
    m.options["eps_lo"] = req.eps_lo;
    m.options["eps_hi"] = req.eps_hi;
    m.options["n_epsilons"] = static_cast<double>(req.n_epsilons);
  }
  return m;
}

RunRequest request_from_manifest(const RunManifest& m) {
  RunRequest r;
  r.kind = m.kind;
  r.system_name = m.system_name;
  r.system_source = m.system_source;
  r.predicate = m.predicate_source;
  r.region = m.region;
  r.t_calc_step = m.h;
  r.number_ic = m.number_ic;
  r.seed = m.seed;
  r.method = m.method;
  if (m.method == "plugin") r.compile_command = m.compile_command;
  auto opt = [&](const char* key) {
    auto it = m.options.find(key);
    if (it == m.options.end()) throw Error(Errc::kIntegrity, std::string("manifest lacks option ") + key);
    return it->second;
  };
  if (m.kind == "solve") {
    r.t0 = m.t0;
    r.t1 = m.t1;
    r.t_plot_step = m.h * static_cast<double>(m.sample_stride);
  } else {
    r.final_time = opt("final_time");
    r.k = static_cast<std::size_t>(opt("k"));
    if (m.kind == "boxcount") r.epsilon = opt("epsilon");
    if (m.kind == "fdim") {
      r.eps_lo = opt("eps_lo");
      r.eps_hi = opt("eps_hi");
      r.n_epsilons = static_cast<std::size_t>(opt("n_epsilons"));
    }
  }
  return r;
}

namespace {

// Builds the plugin in a private temporary directory removed on scope exit.
class PluginBuild {
 public:
  PluginBuild(const SystemDef& sys, IntegratorConfig& cfg) {
    if (!cfg.uses_plugin()) return;
    dir_ = fs::temp_directory_path() / ("chaoscope-plugin-" + new_run_id());
    fs::create_directories(dir_);
    try {
      auto& spec = std::get<PluginSpec>(cfg.method);
      cfg.method = build_plugin(sys, "c99", spec.compile_command, dir_);
    } catch (...) {
      cleanup();
      throw;
    }
  }
  ~PluginBuild() { cleanup(); }
  PluginBuild(const PluginBuild&) = delete;
  PluginBuild& operator=(const PluginBuild&) = delete;

 private:
  void cleanup() {
    if (dir_.empty()) return;
    std::error_code ec;
    fs::remove_all(dir_, ec);
    dir_.clear();
  }
  fs::path dir_;
};

}  // namespace

WorkflowResult execute(const PreparedRun& run, const Store& store, const RunControl& control,
                       std::vector<Trajectory>* trajectories_out) {
  const auto start = std::chrono::steady_clock::now();
  const RunRequest& req = run.request;
  IntegratorConfig cfg = run.cfg;
  PluginBuild plugin(run.system, cfg);

  WorkflowResult out;
  out.kind = req.kind;
  RunResults results;
  ICSet ics = sample_ics(run.region, req.number_ic, req.seed);
  results.ics = ics;
  std::vector<Trajectory> trajs;

  if (req.kind == "solve") {
    trajs.resize(ics.count());
    const std::size_t workers = worker_count(control, ics.count());
    std::vector<std::unique_ptr<Rk5Stepper>> steppers(workers);
    parallel_for(ics.count(), control, [&](std::size_t i, std::size_t worker) {
      if (cfg.uses_plugin()) {
        trajs[i] = integrate_any(run.system, ics.points[i], cfg, i);
        return;
      }
      if (!steppers[worker]) steppers[worker] = std::make_unique<Rk5Stepper>(run.system);
      trajs[i] = integrate_with(*steppers[worker], ics.points[i], cfg, i);
    });
    out.trajectories = trajs.size();
    for (const auto& t : trajs) out.failed += t.completed() ? 0 : 1;
  } else {
    BoundaryParams params;
    params.t_final = req.final_time;
    params.cfg = cfg;
    params.k = req.k;
    params.seed = req.seed;
    if (req.kind == "boxcount") {
      results.boxcount = boxcount(run.system, ics, *run.predicate, req.epsilon, params, control);
      out.boxcount = results.boxcount;
    } else {
      results.fdim = fdimension(run.system, ics, *run.predicate, req.eps_lo, req.eps_hi,
                                req.n_epsilons, params, control);
      out.fdim = results.fdim;
    }
  }

  out.run_id = store.save_run(manifest_for(run), trajs, results);
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (trajectories_out) *trajectories_out = std::move(trajs);
  return out;
}

}  // namespace chaoscope
