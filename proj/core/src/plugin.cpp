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

#include <unistd.h>

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "chaoscope/error.hpp"
#include "chaoscope/integrate.hpp"
#include "process.hpp"

namespace chaoscope {

namespace fs = std::filesystem;

namespace {

// Exit status the driver uses when the orbit stops being finite. The output
// file then holds the valid prefix and stderr names the last good time.
constexpr int kNumericalFailureExit = 3;

constexpr const char* kDriverSource = R"(/* Fixed-step Cash-Karp 5th-order driver.
 *
 * usage: rk5 <input> <output>
 * input:  n / t0 t1 h stride / x0[0] .. x0[n-1]
 * output: one line per recorded sample, "t x[0] .. x[n-1]"
 * exit:   0 ok, 3 non-finite state (prefix written), other nonzero on error.
 */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>

void derivs(double t, const double *x, double *dxdt);

static const double C[6] = {0.0, 1.0 / 5.0, 3.0 / 10.0, 3.0 / 5.0, 1.0, 7.0 / 8.0};
static const double A[6][5] = {
    {0.0, 0.0, 0.0, 0.0, 0.0},
    {1.0 / 5.0, 0.0, 0.0, 0.0, 0.0},
    {3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0},
    {3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0, 0.0, 0.0},
    {-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0, 0.0},
    {1631.0 / 55296.0, 175.0 / 512.0, 575.0 / 13824.0, 44275.0 / 110592.0, 253.0 / 4096.0}};
static const double B0 = 37.0 / 378.0, B2 = 250.0 / 621.0, B3 = 125.0 / 594.0,
                    B5 = 512.0 / 1771.0;

static void write_sample(FILE *out, double t, const double *x, int n)
{
  int i;
  fprintf(out, "%.17g", t);
  for (i = 0; i < n; ++i) fprintf(out, " %.17g", x[i]);
  fputc('\n', out);
}

static int finite_state(const double *x, int n)
{
  int i;
  for (i = 0; i < n; ++i)
    if (!isfinite(x[i])) return 0;
  return 1;
}

static void step(double t, double *x, double h, int n, double *k, double *tmp)
{
  int s, i, j;
  derivs(t, x, k);
  for (s = 1; s < 6; ++s) {
    for (i = 0; i < n; ++i) {
      double acc = A[s][0] * k[i];
      for (j = 1; j < s; ++j) acc = acc + A[s][j] * k[j * n + i];
      tmp[i] = x[i] + h * acc;
    }
    derivs(t + C[s] * h, tmp, k + s * n);
  }
  for (i = 0; i < n; ++i) {
    double acc = B0 * k[i];
    acc = acc + B2 * k[2 * n + i];
    acc = acc + B3 * k[3 * n + i];
    acc = acc + B5 * k[5 * n + i];
    x[i] = x[i] + h * acc;
  }
}

int main(int argc, char **argv)
{
  FILE *in, *out;
  int n, i;
  long stride;
  double t0, t1, h, ratio, nearest, last_step;
  unsigned long full, total, s;
  double *x, *k, *tmp;

  if (argc != 3) {
    fprintf(stderr, "usage: rk5 <input> <output>\n");
    return 2;
  }
  in = fopen(argv[1], "r");
  if (!in) {
    fprintf(stderr, "cannot open input %s\n", argv[1]);
    return 2;
  }
  if (fscanf(in, "%d", &n) != 1 || n < 1) {
    fprintf(stderr, "bad dimension on line 1\n");
    return 2;
  }
  if (fscanf(in, "%lf %lf %lf %ld", &t0, &t1, &h, &stride) != 4 || !(h > 0.0) ||
      !(t1 > t0) || stride < 1) {
    fprintf(stderr, "bad time line 2\n");
    return 2;
  }
  x = (double *)malloc(sizeof(double) * (size_t)n);
  k = (double *)malloc(sizeof(double) * (size_t)n * 6);
  tmp = (double *)malloc(sizeof(double) * (size_t)n);
  if (!x || !k || !tmp) {
    fprintf(stderr, "out of memory\n");
    return 2;
  }
  for (i = 0; i < n; ++i) {
    if (fscanf(in, "%lf", &x[i]) != 1) {
      fprintf(stderr, "bad initial condition on line 3\n");
      return 2;
    }
  }
  fclose(in);

  out = fopen(argv[2], "w");
  if (!out) {
    fprintf(stderr, "cannot open output %s\n", argv[2]);
    return 2;
  }

  ratio = (t1 - t0) / h;
  nearest = round(ratio);
  if (fabs(ratio - nearest) <= 1e-9 * fmax(1.0, ratio)) {
    full = (unsigned long)nearest;
    last_step = 0.0;
  } else {
    full = (unsigned long)floor(ratio);
    last_step = t1 - (t0 + (double)full * h);
  }
  total = full + (last_step > 0.0 ? 1 : 0);

  write_sample(out, t0, x, n);
  if (!finite_state(x, n)) {
    fclose(out);
    fprintf(stderr, "non-finite initial condition; last_good=%.17g\n", t0);
    return 3;
  }
  for (s = 0; s < total; ++s) {
    double t = t0 + (double)s * h;
    int partial = s == full;
    unsigned long done = s + 1;
    int last = done == total;
    step(t, x, partial ? last_step : h, n, k, tmp);
    if (!finite_state(x, n)) {
      fclose(out);
      fprintf(stderr, "non-finite state after step from t=%.17g; last_good=%.17g\n", t, t);
      return 3;
    }
    if (last || (!partial && done % (unsigned long)stride == 0)) {
      write_sample(out, last ? t1 : t0 + (double)done * h, x, n);
    }
  }
  if (fclose(out) != 0) {
    fprintf(stderr, "cannot write output\n");
    return 2;
  }
  free(x);
  free(k);
  free(tmp);
  return 0;
}
)";

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

bool rel_close(double a, double b, double tol) {
  if (a == b) return true;
  return std::fabs(a - b) <= tol * std::fmax(std::fabs(a), std::fabs(b));
}

std::atomic<unsigned long long> g_run_counter{0};

}  // namespace

const std::string& plugin_driver_source() {
  static const std::string source(kDriverSource);
  return source;
}

std::string format_plugin_input(std::span<const double> x0, const IntegratorConfig& cfg) {
  std::string out = std::to_string(x0.size()) + "\n";
  out += g17(cfg.t0) + " " + g17(cfg.t1) + " " + g17(cfg.h) + " " +
         std::to_string(cfg.sample_stride) + "\n";
  for (std::size_t i = 0; i < x0.size(); ++i) {
    if (i) out += ' ';
    out += g17(x0[i]);
  }
  out += "\n";
  return out;
}

Trajectory parse_plugin_output(const std::string& body, std::size_t dimension) {
  Trajectory traj;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < body.size()) {
    std::size_t end = body.find('\n', pos);
    const bool terminated = end != std::string::npos;
    if (!terminated) end = body.size();
    std::string_view line(body.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!terminated) {
      throw Error(Errc::kPluginOutput,
                  "plugin output line " + std::to_string(line_no) + " is truncated (no newline)");
    }
    std::vector<double> fields;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && line[i] == ' ') ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ') ++j;
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + j, v);
      if (ec != std::errc() || ptr != line.data() + j) {
        throw Error(Errc::kPluginOutput, "plugin output line " + std::to_string(line_no) +
                                             ", field " + std::to_string(fields.size() + 1) +
                                             ": malformed number '" +
                                             std::string(line.substr(i, j - i)) + "'");
      }
      fields.push_back(v);
      i = j;
    }
    if (fields.size() != dimension + 1) {
      throw Error(Errc::kPluginOutput, "plugin output line " + std::to_string(line_no) +
                                           ": expected " + std::to_string(dimension + 1) +
                                           " fields, found " + std::to_string(fields.size()));
    }
    if (!traj.times.empty() && !(fields[0] > traj.times.back())) {
      throw Error(Errc::kPluginOutput, "plugin output line " + std::to_string(line_no) +
                                           ", field 1: time is not increasing");
    }
    traj.times.push_back(fields[0]);
    traj.states.emplace_back(fields.begin() + 1, fields.end());
  }
  if (traj.times.empty()) {
    throw Error(Errc::kPluginOutput, "plugin output is empty");
  }
  return traj;
}

Trajectory run_plugin(const PluginSpec& plugin, std::span<const double> x0,
                      const IntegratorConfig& cfg, std::size_t ic_index) {
  cfg.validate();
  const std::string stem = "rk5_" + std::to_string(::getpid()) + "_" +
                           std::to_string(g_run_counter.fetch_add(1));
  const fs::path input = plugin.workdir / (stem + ".in");
  const fs::path output = plugin.workdir / (stem + ".out");
  const fs::path errors = plugin.workdir / (stem + ".err");
  struct Cleanup {
    std::vector<fs::path> paths;
    ~Cleanup() {
      std::error_code ec;
      for (const auto& p : paths) fs::remove(p, ec);
    }
  } cleanup{{input, output, errors}};

  detail::write_file(input, format_plugin_input(x0, cfg));
  const auto result = detail::spawn_and_wait(
      {plugin.executable_path.string(), input.string(), output.string()}, errors,
      plugin.timeout);
  if (result.timed_out) {
    throw Error(Errc::kTimeout, "plugin exceeded " + std::to_string(plugin.timeout.count()) +
                                    " ms wall-clock limit");
  }
  std::string reason = result.stderr_text;
  while (!reason.empty() && (reason.back() == '\n' || reason.back() == '\r')) reason.pop_back();
  if (result.exit_code != 0 && result.exit_code != kNumericalFailureExit) {
    throw Error(Errc::kPluginExecution, "plugin exited with status " +
                                            std::to_string(result.exit_code) +
                                            (reason.empty() ? "" : ": " + reason));
  }
  std::error_code ec;
  if (!fs::exists(output, ec)) {
    throw Error(Errc::kPluginOutput, "plugin produced no output file");
  }
  Trajectory traj = parse_plugin_output(detail::read_file(output), x0.size());
  traj.ic_index = ic_index;
  if (result.exit_code == kNumericalFailureExit) {
    double last_good = traj.times.back();
    const auto at = reason.find("last_good=");
    if (at != std::string::npos) {
      const char* begin = reason.c_str() + at + 10;
      std::from_chars(begin, reason.c_str() + reason.size(), last_good);
    }
    traj.status = Failed{reason, last_good};
  }
  return traj;
}

PluginSpec build_plugin(const SystemDef& sys, std::string_view dialect,
                        const std::string& compile_command, const fs::path& workdir) {
  const std::string kernel = emit_kernel_source(sys, dialect);

  std::error_code ec;
  fs::create_directories(workdir, ec);
  if (ec) throw Error(Errc::kIo, "cannot create plugin workdir '" + workdir.string() + "'");

  PluginSpec spec;
  spec.workdir = fs::absolute(workdir);
  spec.kernel_source_path = spec.workdir / "derivs.c";
  spec.driver_source_path = spec.workdir / "rk5.c";
  spec.executable_path = spec.workdir / "rk5.exe";
  spec.compile_command = compile_command;
  detail::write_file(spec.kernel_source_path, kernel);
  detail::write_file(spec.driver_source_path, plugin_driver_source());
  fs::remove(spec.executable_path, ec);

  if (compile_command.find_first_not_of(" \t") == std::string::npos) throw Error(Errc::kCompilerNotFound, "empty compile command");
  std::string cmd = replace_all(compile_command, "{src}",
                                detail::shell_quote(spec.kernel_source_path.string()) + " " +
                                    detail::shell_quote(spec.driver_source_path.string()));
  cmd = replace_all(cmd, "{exe}", detail::shell_quote(spec.executable_path.string()));
  const auto compiled = detail::run_shell(cmd);
  if (compiled.exit_code == 127 || compiled.exit_code == 126) {
    throw Error(Errc::kCompilerNotFound,
                "compiler not found or not executable: " + compile_command);
  }
  if (compiled.exit_code != 0 || !fs::exists(spec.executable_path, ec)) {
    std::string diag = compiled.output;
    for (auto& c : diag) {
      if (c == '\n') c = ' ';
    }
    if (diag.size() > 400) diag = diag.substr(0, 400) + "...";
    throw Error(Errc::kCompileFailed, "kernel compilation failed (status " +
                                          std::to_string(compiled.exit_code) + "): " + diag);
  }

  // Handshake: one step from a fixed probe state must match the native step.
  std::vector<double> probe(sys.dimension());
  for (std::size_t i = 0; i < probe.size(); ++i) probe[i] = 0.5 + 0.25 * static_cast<double>(i);
  const double probe_h = 1.0 / 1024.0;
  IntegratorConfig probe_cfg;
  probe_cfg.method = spec;
  probe_cfg.t0 = 0.0;
  probe_cfg.t1 = probe_h;
  probe_cfg.h = probe_h;
  probe_cfg.sample_stride = 1;
  const Trajectory native = integrate(sys, probe, probe_cfg);
  const Trajectory external = run_plugin(spec, probe, probe_cfg);
  if (native.completed() != external.completed()) {
    throw Error(Errc::kHandshakeMismatch,
                "handshake: native and plugin disagree on probe step success");
  }
  if (native.completed()) {
    const auto& a = native.final_state();
    const auto& b = external.final_state();
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!rel_close(a[i], b[i], 1e-12)) {
        throw Error(Errc::kHandshakeMismatch,
                    "handshake: component " + std::to_string(i) + " differs (native " +
                        g17(a[i]) + ", plugin " + g17(b[i]) + ")");
      }
    }
  }
  return spec;
}

}  // namespace chaoscope
