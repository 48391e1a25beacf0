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
#include <span>
#include <string>
#include <vector>

namespace chaoscope {

struct BoxCountPoint {
  double delta;
  std::uint64_t count;
};

// Counts of occupied cells at decreasing normalized cell edges.
class BoxCountSeries {
 public:
  // Validates: at least two points, delta in (0, 1) and strictly
  // decreasing, counts positive and non-decreasing.
  explicit BoxCountSeries(std::vector<BoxCountPoint> points);

  const std::vector<BoxCountPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

 private:
  std::vector<BoxCountPoint> points_;
};

// Self-similar family: each of b pieces is refined into b pieces at scale
// 1/s, for M iterations. b=4, s=3 is the four-segment construction with
// dimension ln4/ln3; b=2, s=3 the middle-thirds Cantor set.
struct FractalFamily {
  std::uint64_t branches;
  std::uint64_t scale;
  std::uint32_t iterations;
  std::uint32_t embedding_dimension = 1;

  // branches <= scale^embedding_dimension; (4, 3) is accepted in 1-D.
  void validate() const;
};

// Points (s^-m, b^m) for m = 1..M. Throws Error(kOverflow) if b^M or s^M
// does not fit in 64 bits.
BoxCountSeries family_counts(const FractalFamily& family);

// Number of distinct cells of edge delta (per-axis floor(coord / delta),
// coordinate 1 clamped into the last cell) holding at least one point.
// Points are rows of a unit-hypercube sample, all of the same length.
std::uint64_t box_count_points(std::span<const std::vector<double>> points, double delta);

struct DimensionEstimate {
  double d;
  double pearson_r;
  double se_slope;
};

// OLS of ln(count) on ln(delta); d = -slope.
DimensionEstimate estimate_dimension(const BoxCountSeries& series);

// Like estimate_dimension but over arbitrary (delta, count) pairs in any
// order; used for point-set series and reordering checks.
DimensionEstimate estimate_dimension(std::span<const BoxCountPoint> points);

// Centres of the 2^M level-M intervals of the middle-thirds Cantor set, as
// 1-D points in [0, 1].
std::vector<std::vector<double>> cantor_points(std::uint32_t iterations);

// CSV "delta,count" with a header row.
std::string series_to_csv(std::span<const BoxCountPoint> points);
// Parses "delta,count" CSV (header optional). Throws Error(kSyntax) with the
// 1-based line number on malformed rows.
std::vector<BoxCountPoint> series_from_csv(const std::string& text);

// Reads a CSV of points (one row per point, comma-separated coordinates in
// [0, 1], optional header) for box counting.
std::vector<std::vector<double>> points_from_csv(const std::string& text);

}  // namespace chaoscope
