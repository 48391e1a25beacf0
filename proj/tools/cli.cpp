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

#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "chaoscope/error.hpp"
#include "chaoscope/fractal.hpp"
#include "chaoscope/projection.hpp"
#include "chaoscope/service.hpp"
#include "chaoscope/store.hpp"
#include "chaoscope/workflow.hpp"

namespace fs = std::filesystem;

namespace chaoscope::cli {
namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  if (!out || !(out << body)) throw Error(Errc::kIo, "cannot write " + p.string());
}

double to_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw Error(Errc::kValidation, what + ": '" + s + "' is not a number");
  return v;
}

// "a..b"
std::pair<double, double> parse_range(const std::string& text, const std::string& what) {
  auto pos = text.find("..");
  if (pos == std::string::npos) throw Error(Errc::kValidation, what + " must look like lo..hi");
  return {to_double(text.substr(0, pos), what), to_double(text.substr(pos + 2), what)};
}

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Flags shared by solve, boxcount and fdim. Each is applied only when given
// so that a --config file can supply the rest.
struct RunFlags {
  std::string config;
  std::string system;
  std::vector<std::string> params;
  std::string predicate;
  std::string region;
  std::size_t number_ic = 0;
  std::uint64_t seed = 0;
  double t_calc_step = 0.0;
  std::string method;
  std::string compile_command;
  std::size_t workers = 0;
  std::string store;
  // solve
  std::string t_range;
  double t_plot_step = 0.0;
  std::string out;
  std::string svg;
  std::string vars;
  // boxcount / fdim
  double epsilon = 0.0;
  std::string epsilon_range;
  std::size_t n_epsilons = 0;
  double final_time = 0.0;
  std::size_t k = 0;

  CLI::App* app = nullptr;

  bool given(const std::string& name) const { return app->count(name) > 0; }
};

void add_common(CLI::App* app, RunFlags& f) {
  f.app = app;
  app->add_option("--config", f.config, "JSON file with request fields; flags override it");
  app->add_option("--system", f.system, "system definition file");
  app->add_option("--param", f.params, "override a parameter, NAME=VALUE (repeatable)");
  app->add_option("--predicate", f.predicate, "classification predicate, e.g. 'x<0'");
  app->add_option("--region", f.region, "init region, e.g. 'x=-1..1, y=-1..1'");
  app->add_option("--number-ic", f.number_ic, "number of initial conditions (default 8)");
  app->add_option("--seed", f.seed, "random seed (default 1)");
  app->add_option("--t-calc-step", f.t_calc_step, "integration step h (default 0.01)");
  app->add_option("--method", f.method, "native or plugin (default native)")
      ->check(CLI::IsMember({"native", "plugin"}));
  app->add_option("--compile-command", f.compile_command,
                  "plugin compile command with {exe} and {src} placeholders");
  app->add_option("--workers", f.workers, "worker threads (default: all cores)");
  app->add_option("--store", f.store, "store root (default $CHAOSCOPE_STORE or ./chaoscope-store)");
}

void add_boundary(CLI::App* app, RunFlags& f) {
  app->add_option("--final-time", f.final_time, "integration time per orbit");
  app->add_option("--k", f.k, "perturbed copies per initial condition (default 2)");
}

RunRequest build_request(const std::string& kind, const RunFlags& f) {
  RunRequest r;
  if (!f.config.empty()) {
    r = request_from_json_text(slurp(f.config), fs::path(f.config).parent_path());
  }
  if (!r.kind.empty() && r.kind != kind) {
    throw Error(Errc::kValidation, "config file is for '" + r.kind + "', not '" + kind + "'");
  }
  r.kind = kind;
  if (f.given("--system")) {
    r.system_source = slurp(f.system);
    r.system_name = fs::path(f.system).stem().string();
  }
  for (const auto& p : f.params) {
    auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(Errc::kValidation, "--param expects NAME=VALUE, got '" + p + "'");
    }
    r.params[p.substr(0, eq)] = to_double(p.substr(eq + 1), "--param " + p.substr(0, eq));
  }
  if (f.given("--predicate")) r.predicate = f.predicate;
  if (f.given("--region")) r.region = InitRegion::parse(f.region);
  if (f.given("--number-ic")) r.number_ic = f.number_ic;
  if (f.given("--seed")) r.seed = f.seed;
  if (f.given("--t-calc-step")) r.t_calc_step = f.t_calc_step;
  if (f.given("--method")) r.method = f.method;
  if (f.given("--compile-command")) r.compile_command = f.compile_command;
  if (kind == "solve") {
    if (f.given("--t-range")) std::tie(r.t0, r.t1) = parse_range(f.t_range, "--t-range");
    if (f.given("--t-plot-step")) r.t_plot_step = f.t_plot_step;
  } else {
    if (f.given("--final-time")) r.final_time = f.final_time;
    if (f.given("--k")) r.k = f.k;
    if (kind == "boxcount" && f.given("--epsilon")) r.epsilon = f.epsilon;
    if (kind == "fdim") {
      if (f.given("--epsilon-range")) {
        std::tie(r.eps_lo, r.eps_hi) = parse_range(f.epsilon_range, "--epsilon-range");
      }
      if (f.given("--n-epsilons")) r.n_epsilons = f.n_epsilons;
    }
  }
  return r;
}

RunControl control_for(const RunFlags& f) {
  RunControl c;
  c.workers = f.given("--workers") ? f.workers : std::max(1u, std::thread::hardware_concurrency());
  if (c.workers < 1) throw Error(Errc::kValidation, "--workers must be at least 1");
  return c;
}

Store store_for(const std::string& flag) {
  return Store(flag.empty() ? Store::default_root() : fs::path(flag));
}

int cmd_solve(const RunFlags& f, std::ostream& out) {
  PreparedRun run = prepare(build_request("solve", f));
  const auto& vars = run.system.state_vars();
  std::size_t ix = 0, iy = vars.size() > 1 ? 1 : 0;
  if (f.given("--vars")) {
    auto comma = f.vars.find(',');
    if (comma == std::string::npos) throw Error(Errc::kValidation, "--vars expects two names, e.g. x,z");
    ix = run.system.state_index(f.vars.substr(0, comma));
    iy = run.system.state_index(f.vars.substr(comma + 1));
    if (ix == vars.size() || iy == vars.size()) {
      throw Error(Errc::kValidation, "--vars names an unknown variable");
    }
  }
  RunControl control = control_for(f);
  Store store = store_for(f.store);
  std::vector<Trajectory> trajs;
  WorkflowResult r = execute(run, store, control, &trajs);

  if (!f.out.empty()) spill(f.out, projection_csv(trajs, ix, iy, vars[ix], vars[iy]));
  if (!f.svg.empty()) {
    std::vector<std::string> labels;
    if (run.predicate) {
      for (const auto& t : trajs) labels.push_back(classification_name(classify(run.system, t, *run.predicate).cls));
    }
    spill(f.svg, projection_svg(trajs, ix, iy, vars[ix], vars[iy], labels));
  }
  out << "run_id: " << r.run_id << "\n"
      << "trajectories: " << r.trajectories << "\n"
      << "failed: " << r.failed << "\n"
      << "wall_time_s: " << g6(r.wall_seconds) << "\n";
  return 0;
}

int cmd_boxcount(const RunFlags& f, std::ostream& out) {
  PreparedRun run = prepare(build_request("boxcount", f));
  RunControl control = control_for(f);
  Store store = store_for(f.store);
  WorkflowResult r = execute(run, store, control);
  const BoxcountResult& b = *r.boxcount;
  out << "run_id: " << r.run_id << "\n"
      << "epsilon: " << g17(b.epsilon) << "\n"
      << "delta: " << g17(b.delta) << "\n"
      << "n_testable: " << b.n_testable << "\n"
      << "n_boundary: " << b.n_boundary << "\n"
      << "n_excluded: " << b.n_excluded << "\n"
      << "fraction: " << g17(b.fraction()) << "\n"
      << "wall_time_s: " << g6(r.wall_seconds) << "\n";
  return 0;
}

int cmd_fdim(const RunFlags& f, std::ostream& out) {
  PreparedRun run = prepare(build_request("fdim", f));
  RunControl control = control_for(f);
  Store store = store_for(f.store);
  WorkflowResult r = execute(run, store, control);
  const FdimResult& d = *r.fdim;
  if (!f.out.empty()) spill(f.out, fdim_points_csv(d));
  out << "run_id: " << r.run_id << "\n"
      << "epsilon delta fraction n_testable n_boundary used\n";
  for (const auto& p : d.points) {
    out << g6(p.epsilon) << " " << g6(p.delta) << " " << g6(p.fraction) << " " << p.n_testable
        << " " << p.n_boundary << " " << (p.used ? "yes" : "no") << "\n";
  }
  out << "D: " << d.D << "\n"
      << "alpha: " << g17(d.alpha) << "\n"
      << "d_B: " << g17(d.d_B) << "\n"
      << "se_percent: " << g6(d.se_percent) << "\n"
      << "pearson_r: " << g17(d.pearson_r) << "\n"
      << "wall_time_s: " << g6(r.wall_seconds) << "\n";
  return 0;
}

struct FractalFlags {
  std::uint64_t b = 0;
  std::uint64_t s = 0;
  std::uint32_t m = 0;
  std::string points;
  std::string series;
  std::uint32_t levels = 8;
  CLI::App* app = nullptr;
};

int cmd_fractal(const FractalFlags& f, std::ostream& out) {
  const bool family = f.app->count("--b") || f.app->count("--s") || f.app->count("--M");
  const int sources = (family ? 1 : 0) + (f.points.empty() ? 0 : 1) + (f.series.empty() ? 0 : 1);
  if (sources != 1) {
    throw Error(Errc::kValidation, "give exactly one of --b/--s/--M, --points or --series");
  }
  DimensionEstimate e{};
  if (family) {
    if (!f.app->count("--b") || !f.app->count("--s") || !f.app->count("--M")) {
      throw Error(Errc::kValidation, "--b, --s and --M must be given together");
    }
    e = estimate_dimension(family_counts({f.b, f.s, f.m}));
  } else if (!f.series.empty()) {
    auto pts = series_from_csv(slurp(f.series));
    e = estimate_dimension(pts);
  } else {
    if (f.levels < 2 || f.levels > 30) throw Error(Errc::kValidation, "--levels must be in [2, 30]");
    auto pts = points_from_csv(slurp(f.points));
    std::vector<BoxCountPoint> series;
    for (std::uint32_t l = 1; l <= f.levels; ++l) {
      double delta = std::ldexp(1.0, -static_cast<int>(l));
      series.push_back({delta, box_count_points(pts, delta)});
    }
    e = estimate_dimension(series);
  }
  out << "d: " << g17(e.d) << "\n"
      << "pearson_r: " << g17(e.pearson_r) << "\n"
      << "se_slope: " << g17(e.se_slope) << "\n";
  return 0;
}

struct BenchFlags {
  std::string system;
  std::vector<std::string> params;
  std::string region;
  std::string t_range = "0..11";
  double t_calc_step = 0.002;
  std::size_t repetitions = 10;
  std::uint64_t seed = 1;
  std::string compile_command = kDefaultCompileCommand;
};

int cmd_bench(const BenchFlags& f, std::ostream& out) {
  if (f.repetitions < 1) throw Error(Errc::kValidation, "--repetitions must be at least 1");
  if (f.system.empty()) throw Error(Errc::kValidation, "--system is required");
  SystemDef sys = parse_system(slurp(f.system), fs::path(f.system).stem().string());
  std::map<std::string, double> overrides;
  for (const auto& p : f.params) {
    auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(Errc::kValidation, "--param expects NAME=VALUE");
    overrides[p.substr(0, eq)] = to_double(p.substr(eq + 1), "--param");
  }
  if (!overrides.empty()) sys = sys.with_parameters(overrides);
  std::vector<double> x0(sys.dimension(), 1.0);
  if (!f.region.empty()) {
    InitRegion region = InitRegion::parse(f.region);
    region.check_against(sys);
    x0 = sample_ics(region, 1, f.seed).points[0];
  }
  IntegratorConfig cfg;
  std::tie(cfg.t0, cfg.t1) = parse_range(f.t_range, "--t-range");
  cfg.h = f.t_calc_step;
  cfg.sample_stride = plan_steps(cfg.t0, cfg.t1, cfg.h).total_steps();
  cfg.validate();

  using Clock = std::chrono::steady_clock;
  out << "method repetitions seconds_per_trajectory\n";
  {
    Rk5Stepper stepper(sys);
    auto start = Clock::now();
    for (std::size_t i = 0; i < f.repetitions; ++i) integrate_with(stepper, x0, cfg);
    double s = std::chrono::duration<double>(Clock::now() - start).count();
    out << "native " << f.repetitions << " " << g6(s / f.repetitions) << "\n";
  }
  fs::path dir = fs::temp_directory_path() / ("chaoscope-bench-" + new_run_id());
  try {
    fs::create_directories(dir);
    IntegratorConfig pcfg = cfg;
    pcfg.method = build_plugin(sys, "c99", f.compile_command, dir);
    const auto& spec = std::get<PluginSpec>(pcfg.method);
    auto start = Clock::now();
    for (std::size_t i = 0; i < f.repetitions; ++i) run_plugin(spec, x0, pcfg);
    double s = std::chrono::duration<double>(Clock::now() - start).count();
    out << "plugin " << f.repetitions << " " << g6(s / f.repetitions) << "\n";
  } catch (const Error& e) {
    out << "plugin " << f.repetitions << " skipped (" << errc_name(e.code()) << ": " << e.what() << ")\n";
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  return 0;
}

struct ServeFlags {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string store;
  std::size_t workers = 0;
  std::string cors_origin = "*";
};

int cmd_serve(const ServeFlags& f, std::ostream& out) {
  ServiceConfig cfg;
  cfg.store_root = f.store.empty() ? Store::default_root() : fs::path(f.store);
  cfg.host = f.host;
  cfg.port = f.port;
  cfg.workers = f.workers ? f.workers : std::max(1u, std::thread::hardware_concurrency());
  cfg.cors_origin = f.cors_origin;
  Service service(cfg);
  service.bind();
  out << "listening on http://" << f.host << ":" << service.port() << " (store "
      << cfg.store_root.string() << ")" << std::endl;
  service.serve();
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"chaoscope: fractal basin boundary workbench"};
  app.require_subcommand(1);

  RunFlags solve, box, fdim;
  auto* s = app.add_subcommand("solve", "integrate an ensemble of initial conditions and save it");
  add_common(s, solve);
  s->add_option("--t-range", solve.t_range, "time range lo..hi");
  s->add_option("--t-plot-step", solve.t_plot_step, "sampling interval, a multiple of --t-calc-step");
  s->add_option("--out", solve.out, "write the 2-D projection samples as CSV");
  s->add_option("--svg", solve.svg, "write the 2-D projection as SVG");
  s->add_option("--vars", solve.vars, "projection axes, e.g. x,z (default: first two)");

  auto* b = app.add_subcommand("boxcount", "boundary fraction at one perturbation scale");
  add_common(b, box);
  add_boundary(b, box);
  b->add_option("--epsilon", box.epsilon, "perturbation half-edge");

  auto* d = app.add_subcommand("fdim", "boundary dimension over a range of perturbation scales");
  add_common(d, fdim);
  add_boundary(d, fdim);
  d->add_option("--epsilon-range", fdim.epsilon_range, "perturbation range lo..hi");
  d->add_option("--n-epsilons", fdim.n_epsilons, "number of log-spaced scales");
  d->add_option("--out", fdim.out, "write regression points (delta,fraction) as CSV");

  FractalFlags fr;
  auto* f = app.add_subcommand("fractal", "box-counting dimension of a self-similar family or point set");
  fr.app = f;
  f->add_option("--b", fr.b, "pieces per refinement");
  f->add_option("--s", fr.s, "scale factor per refinement");
  f->add_option("--M", fr.m, "number of refinements");
  f->add_option("--points", fr.points, "CSV of points in the unit hypercube");
  f->add_option("--levels", fr.levels, "box sizes 2^-1 .. 2^-levels for --points (default 8)");
  f->add_option("--series", fr.series, "CSV of delta,count pairs");

  BenchFlags bf;
  auto* be = app.add_subcommand("bench", "seconds per trajectory, native vs plugin");
  be->add_option("--system", bf.system, "system definition file");
  be->add_option("--param", bf.params, "override a parameter, NAME=VALUE (repeatable)");
  be->add_option("--region", bf.region, "draw the initial condition from this region");
  be->add_option("--seed", bf.seed, "seed for the initial condition (default 1)");
  be->add_option("--t-range", bf.t_range, "time range lo..hi (default 0..11)");
  be->add_option("--t-calc-step", bf.t_calc_step, "integration step (default 0.002)");
  be->add_option("--repetitions", bf.repetitions, "trajectories per method (default 10)");
  be->add_option("--compile-command", bf.compile_command, "plugin compile command");

  ServeFlags sf;
  auto* sv = app.add_subcommand("serve", "run the HTTP service");
  sv->add_option("--host", sf.host, "bind address (default 127.0.0.1)");
  sv->add_option("--port", sf.port, "port (default 8080, 0 picks a free one)");
  sv->add_option("--store", sf.store, "store root (default $CHAOSCOPE_STORE or ./chaoscope-store)");
  sv->add_option("--workers", sf.workers, "threads per job (default: all cores)");
  sv->add_option("--cors-origin", sf.cors_origin, "Access-Control-Allow-Origin value (default *)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n";
    return 2;
  }
  try {
    if (s->parsed()) return cmd_solve(solve, out);
    if (b->parsed()) return cmd_boxcount(box, out);
    if (d->parsed()) return cmd_fdim(fdim, out);
    if (f->parsed()) return cmd_fractal(fr, out);
    if (be->parsed()) return cmd_bench(bf, out);
    if (sv->parsed()) return cmd_serve(sf, out);
  } catch (const Error& e) {
    err << "error: " << errc_name(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace chaoscope::cli
