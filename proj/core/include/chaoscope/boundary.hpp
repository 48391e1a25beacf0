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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "chaoscope/ensemble.hpp"
#include "chaoscope/integrate.hpp"
#include "chaoscope/sysdsl.hpp"

namespace chaoscope {

struct AxisRange {
  std::string var;
  double lo;
  double hi;
};

// Axis-aligned box of initial conditions, one range per state variable in
// system order.
class InitRegion {
 public:
  InitRegion() = default;
  explicit InitRegion(std::vector<AxisRange> ranges);

  const std::vector<AxisRange>& ranges() const { return ranges_; }
  std::size_t dimension() const { return ranges_.size(); }
  double longest_edge() const;
  bool contains(std::span<const double> x) const;

  // Throws Error(kValidation) unless axes match sys.state_vars() in order.
  void check_against(const SystemDef& sys) const;

  // "x=-1.001..1.001, y=-1.001..1.001, z=21.999..22.001"
  static InitRegion parse(std::string_view text);
  std::string to_string() const;

 private:
  std::vector<AxisRange> ranges_;
};

struct ICSet {
  InitRegion region;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> points;

  std::size_t count() const { return points.size(); }
};

// count points, each axis drawn independently and uniformly from the
// region; point i depends only on (region, seed, i).
ICSet sample_ics(const InitRegion& region, std::size_t count, std::uint64_t seed);

enum class Classification { kTrue, kFalse, kUntestable };

struct ClassifyOutcome {
  Classification cls;
  std::string reason;  // set when untestable
};

// Untestable iff the trajectory failed or the predicate left its domain;
// otherwise the predicate evaluated on the final recorded state.
ClassifyOutcome classify(const SystemDef& sys, const Trajectory& traj, const Predicate& p);

struct BoxcountResult {
  double epsilon = 0.0;
  double delta = 0.0;
  std::size_t n_testable = 0;
  std::size_t n_boundary = 0;
  std::size_t n_excluded = 0;

  double fraction() const {
    return n_testable ? static_cast<double>(n_boundary) / static_cast<double>(n_testable) : 0.0;
  }
};

struct BoundaryParams {
  double t_final = 0.0;
  IntegratorConfig cfg;  // t0, h and method are used; t1 is replaced by t_final
  std::size_t k = 2;     // perturbed copies per base initial condition
  std::uint64_t seed = 0;
};

// Perturbed copy j of base point i: uniform in the cube of half-edge epsilon
// around base, unclipped. The underlying uniforms depend on (seed, i, j)
// only, so the same draws are rescaled for every epsilon.
std::vector<double> perturb(std::span<const double> base, double epsilon, std::uint64_t seed,
                            std::size_t index, std::size_t copy);

// Classifies every base IC and its k perturbations at scale epsilon. A cell
// is testable when all k+1 orbits are; it is a boundary cell when their
// classes are not all equal. delta = epsilon / longest region edge.
// Throws Error(kNoStatistics) when no cell is testable.
BoxcountResult boxcount(const SystemDef& sys, const ICSet& ics, const Predicate& p,
                        double epsilon, const BoundaryParams& params,
                        const RunControl& control = {});

struct FdimPoint {
  double epsilon = 0.0;
  double delta = 0.0;
  double fraction = 0.0;
  std::size_t n_testable = 0;
  std::size_t n_boundary = 0;
  std::size_t n_excluded = 0;
  bool used = true;  // false when dropped from the fit (no boundary cells)
};

struct FdimResult {
  std::size_t D = 0;
  double alpha = 0.0;
  double d_B = 0.0;
  double se_percent = 0.0;
  double pearson_r = 0.0;
  double intercept = 0.0;
  double se_slope = 0.0;
  std::vector<FdimPoint> points;
};

// n log-spaced values from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, std::size_t n);

// Fits ln(fraction) = intercept + alpha ln(delta) over the used points and
// sets d_B = D - alpha, se_percent = 100 se_slope / d_B. Points with
// fraction <= 0 are marked unused. Throws Error(kNoStatistics) with fewer
// than two usable points.
FdimResult regress_fractions(std::size_t D, std::vector<FdimPoint> points);

// Boxcount over n_epsilons log-spaced perturbation scales in [lo, hi]
// followed by regress_fractions. Base orbits are integrated once and
// shared across scales; results equal independent boxcount() calls.
FdimResult fdimension(const SystemDef& sys, const ICSet& ics, const Predicate& p, double eps_lo,
                      double eps_hi, std::size_t n_epsilons, const BoundaryParams& params,
                      const RunControl& control = {});

std::string classification_name(Classification c);

}  // namespace chaoscope
