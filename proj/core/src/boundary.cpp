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

#include "chaoscope/boundary.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>
#include <optional>

#include "chaoscope/error.hpp"
#include "chaoscope/regression.hpp"
#include "chaoscope/rng.hpp"

namespace chaoscope {

// ---- regions ----

InitRegion::InitRegion(std::vector<AxisRange> ranges) : ranges_(std::move(ranges)) {
  if (ranges_.empty()) throw Error(Errc::kValidation, "init region needs at least one axis");
  for (const auto& r : ranges_) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi)) {
      throw Error(Errc::kValidation, "init region bounds for '" + r.var + "' must be finite");
    }
    if (r.lo > r.hi) {
      throw Error(Errc::kValidation, "init region axis '" + r.var + "' has lo > hi");
    }
  }
  for (std::size_t i = 0; i < ranges_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (ranges_[i].var == ranges_[j].var) {
        throw Error(Errc::kValidation, "init region names axis '" + ranges_[i].var + "' twice");
      }
    }
  }
}

double InitRegion::longest_edge() const {
  double a = 0.0;
  for (const auto& r : ranges_) a = std::max(a, r.hi - r.lo);
  return a;
}

bool InitRegion::contains(std::span<const double> x) const {
  if (x.size() != ranges_.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= ranges_[i].lo && x[i] <= ranges_[i].hi)) return false;
  }
  return true;
}

void InitRegion::check_against(const SystemDef& sys) const {
  if (ranges_.size() != sys.dimension()) {
    throw Error(Errc::kValidation, "init region has " + std::to_string(ranges_.size()) +
                                       " axes, system has " + std::to_string(sys.dimension()) +
                                       " state variables");
  }
  for (std::size_t i = 0; i < ranges_.size(); ++i) {
    if (ranges_[i].var != sys.state_vars()[i]) {
      throw Error(Errc::kValidation, "init region axis " + std::to_string(i) + " is '" +
                                         ranges_[i].var + "', expected '" +
                                         sys.state_vars()[i] + "'");
    }
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_real(std::string_view s, std::string_view what) {
  s = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(Errc::kValidation, "malformed number '" + std::string(s) + "' in " +
                                       std::string(what));
  }
  return v;
}

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

InitRegion InitRegion::parse(std::string_view text) {
  std::vector<AxisRange> ranges;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    const auto item = trim(text.substr(start, end - start));
    start = end + 1;
    if (item.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = item.find('=');
    const auto dots = item.find("..", eq == std::string_view::npos ? 0 : eq);
    if (eq == std::string_view::npos || dots == std::string_view::npos) {
      throw Error(Errc::kValidation,
                  "region axis '" + std::string(item) + "' must look like var=lo..hi");
    }
    AxisRange r;
    r.var = std::string(trim(item.substr(0, eq)));
    r.lo = parse_real(item.substr(eq + 1, dots - eq - 1), "region");
    r.hi = parse_real(item.substr(dots + 2), "region");
    ranges.push_back(std::move(r));
    if (end == text.size()) break;
  }
  return InitRegion(std::move(ranges));
}

std::string InitRegion::to_string() const {
  std::string out;
  for (const auto& r : ranges_) {
    if (!out.empty()) out += ", ";
    out += r.var + "=" + g17(r.lo) + ".." + g17(r.hi);
  }
  return out;
}

ICSet sample_ics(const InitRegion& region, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw Error(Errc::kValidation, "initial condition count must be positive");
  ICSet set;
  set.region = region;
  set.seed = seed;
  set.points.resize(count);
  const auto& ranges = region.ranges();
  for (std::size_t i = 0; i < count; ++i) {
    StreamRng rng(seed, StreamRng::Purpose::kInitialCondition, i);
    auto& p = set.points[i];
    p.resize(ranges.size());
    for (std::size_t a = 0; a < ranges.size(); ++a) {
      const double u = rng.uniform();
      p[a] = ranges[a].lo == ranges[a].hi
                 ? ranges[a].lo
                 : std::min(ranges[a].hi, ranges[a].lo + (ranges[a].hi - ranges[a].lo) * u);
    }
  }
  return set;
}

// ---- classification ----

std::string classification_name(Classification c) {
  switch (c) {
    case Classification::kTrue: return "true";
    case Classification::kFalse: return "false";
    case Classification::kUntestable: return "untestable";
  }
  return "?";
}

ClassifyOutcome classify(const SystemDef& sys, const Trajectory& traj, const Predicate& p) {
  if (const auto* failed = std::get_if<Failed>(&traj.status)) {
    return {Classification::kUntestable, failed->reason};
  }
  if (traj.states.empty()) return {Classification::kUntestable, "empty trajectory"};
  try {
    return {eval_predicate(p, sys, traj.final_state()) ? Classification::kTrue
                                                        : Classification::kFalse,
            {}};
  } catch (const DomainError& e) {
    return {Classification::kUntestable, e.what()};
  }
}

std::vector<double> perturb(std::span<const double> base, double epsilon, std::uint64_t seed,
                            std::size_t index, std::size_t copy) {
  StreamRng rng(seed, StreamRng::Purpose::kPerturbation, index, copy);
  std::vector<double> out(base.begin(), base.end());
  for (auto& v : out) v = v + epsilon * (2.0 * rng.uniform() - 1.0);
  return out;
}

// ---- box counting ----

namespace {

IntegratorConfig final_state_config(const BoundaryParams& params) {
  IntegratorConfig cfg = params.cfg;
  cfg.t1 = params.t_final;
  if (!(cfg.t1 > cfg.t0)) {
    throw Error(Errc::kValidation, "final time must exceed the integration start time");
  }
  cfg.sample_stride = 1;
  cfg.validate();
  // Record only the initial and final states.
  cfg.sample_stride = std::max<std::size_t>(1, plan_steps(cfg.t0, cfg.t1, cfg.h).total_steps());
  return cfg;
}

// Classes for every (base, scale, copy); computes each base orbit once.
std::vector<BoxcountResult> count_scales(const SystemDef& sys, const ICSet& ics,
                                         const Predicate& p, const std::vector<double>& epsilons,
                                         const BoundaryParams& params,
                                         const RunControl& control) {
  if (params.k < 2) throw Error(Errc::kValidation, "need at least 2 perturbations per cell");
  if (ics.points.empty()) throw Error(Errc::kValidation, "no initial conditions");
  for (double eps : epsilons) {
    if (!(eps > 0.0) || !std::isfinite(eps)) {
      throw Error(Errc::kValidation, "perturbation epsilon must be positive");
    }
  }
  ics.region.check_against(sys);
  const double edge = ics.region.longest_edge();
  if (!(edge > 0.0)) {
    throw Error(Errc::kValidation, "init region is degenerate; delta = epsilon / edge undefined");
  }
  const IntegratorConfig cfg = final_state_config(params);
  const bool native = !cfg.uses_plugin();

  const std::size_t n = ics.points.size();
  const std::size_t scales = epsilons.size();
  const std::size_t k = params.k;
  // 0: untestable, 1: false, 2: true
  std::vector<unsigned char> classes(n * (1 + scales * k));
  auto slot = [&](std::size_t i, std::size_t s, std::size_t j) -> unsigned char& {
    return classes[i * (1 + scales * k) + 1 + s * k + j];
  };

  const std::size_t workers = worker_count(control, n);
  std::vector<std::unique_ptr<Rk5Stepper>> steppers(workers);
  auto code = [](Classification c) -> unsigned char {
    return c == Classification::kUntestable ? 0 : (c == Classification::kFalse ? 1 : 2);
  };

  parallel_for(n, control, [&](std::size_t i, std::size_t worker) {
    auto run = [&](std::span<const double> x0) {
      if (native) {
        if (!steppers[worker]) steppers[worker] = std::make_unique<Rk5Stepper>(sys);
        return integrate_with(*steppers[worker], x0, cfg, i);
      }
      return integrate_any(sys, x0, cfg, i);
    };
    classes[i * (1 + scales * k)] = code(classify(sys, run(ics.points[i]), p).cls);
    for (std::size_t s = 0; s < scales; ++s) {
      for (std::size_t j = 0; j < k; ++j) {
        const auto x0 = perturb(ics.points[i], epsilons[s], params.seed, i, j);
        slot(i, s, j) = code(classify(sys, run(x0), p).cls);
      }
    }
  });

  std::vector<BoxcountResult> results(scales);
  for (std::size_t s = 0; s < scales; ++s) {
    auto& r = results[s];
    r.epsilon = epsilons[s];
    r.delta = epsilons[s] / edge;
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned char base = classes[i * (1 + scales * k)];
      bool testable = base != 0;
      bool mixed = false;
      for (std::size_t j = 0; j < k; ++j) {
        const unsigned char c = slot(i, s, j);
        if (c == 0) testable = false;
        if (c != base) mixed = true;
      }
      if (!testable) {
        ++r.n_excluded;
      } else {
        ++r.n_testable;
        if (mixed) ++r.n_boundary;
      }
    }
  }
  return results;
}

}  // namespace

BoxcountResult boxcount(const SystemDef& sys, const ICSet& ics, const Predicate& p,
                        double epsilon, const BoundaryParams& params,
                        const RunControl& control) {
  auto results = count_scales(sys, ics, p, {epsilon}, params, control);
  if (results.front().n_testable == 0) {
    throw Error(Errc::kNoStatistics, "no testable cells: every orbit failed to integrate");
  }
  return results.front();
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo)) {
    throw Error(Errc::kValidation, "log spacing needs 0 < lo < hi");
  }
  if (n < 2) throw Error(Errc::kValidation, "need at least 2 values");
  std::vector<double> out(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

FdimResult regress_fractions(std::size_t D, std::vector<FdimPoint> points) {
  std::vector<double> x;
  std::vector<double> y;
  for (auto& pt : points) {
    pt.used = pt.fraction > 0.0 && pt.delta > 0.0;
    if (pt.used) {
      x.push_back(std::log(pt.delta));
      y.push_back(std::log(pt.fraction));
    }
  }
  if (x.size() < 2) {
    throw Error(Errc::kNoStatistics,
                "fewer than 2 perturbation scales produced boundary cells (" +
                    std::to_string(x.size()) + " of " + std::to_string(points.size()) + ")");
  }
  const LineFit fit = fit_line(x, y);
  FdimResult r;
  r.D = D;
  r.alpha = fit.slope;
  r.d_B = static_cast<double>(D) - r.alpha;
  r.intercept = fit.intercept;
  r.se_slope = fit.se_slope;
  r.pearson_r = fit.pearson_r;
  r.se_percent = r.d_B != 0.0 ? 100.0 * fit.se_slope / std::fabs(r.d_B) : 0.0;
  r.points = std::move(points);
  return r;
}

FdimResult fdimension(const SystemDef& sys, const ICSet& ics, const Predicate& p, double eps_lo,
                      double eps_hi, std::size_t n_epsilons, const BoundaryParams& params,
                      const RunControl& control) {
  const auto epsilons = log_spaced(eps_lo, eps_hi, n_epsilons);
  const auto counts = count_scales(sys, ics, p, epsilons, params, control);
  std::vector<FdimPoint> points;
  for (const auto& c : counts) {
    FdimPoint pt;
    pt.epsilon = c.epsilon;
    pt.delta = c.delta;
    pt.fraction = c.fraction();
    pt.n_testable = c.n_testable;
    pt.n_boundary = c.n_boundary;
    pt.n_excluded = c.n_excluded;
    points.push_back(pt);
  }
  return regress_fractions(sys.dimension(), std::move(points));
}

}  // namespace chaoscope
