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

#include "chaoscope/fractal.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "chaoscope/error.hpp"
#include "chaoscope/regression.hpp"

namespace chaoscope {

namespace {

bool checked_pow(std::uint64_t base, std::uint32_t exp, std::uint64_t* out) {
  std::uint64_t r = 1;
  for (std::uint32_t i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base) return false;
    r *= base;
  }
  *out = r;
  return true;
}

struct CellHash {
  std::size_t operator()(const std::vector<std::int64_t>& cell) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto v : cell) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto at = s.find(sep, start);
    out.push_back(s.substr(start, at == std::string_view::npos ? s.npos : at - start));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
bool parse_field(std::string_view s, T* out) {
  s = trim(s);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

// Iterates non-empty lines with their 1-based numbers.
template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    fn(line, line_no);
  }
}

bool looks_like_header(std::string_view line) {
  for (char c : line) {
    if (std::isalpha(static_cast<unsigned char>(c)) && c != 'e' && c != 'E') return true;
  }
  return false;
}

}  // namespace

BoxCountSeries::BoxCountSeries(std::vector<BoxCountPoint> points) : points_(std::move(points)) {
  if (points_.size() < 2) {
    throw Error(Errc::kValidation, "box-count series needs at least 2 points");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!(p.delta > 0.0 && p.delta < 1.0)) {
      throw Error(Errc::kValidation, "box-count delta must lie in (0, 1)");
    }
    if (p.count == 0) throw Error(Errc::kValidation, "box counts must be positive");
    if (i > 0) {
      if (!(p.delta < points_[i - 1].delta)) {
        throw Error(Errc::kValidation, "box-count deltas must be strictly decreasing");
      }
      if (p.count < points_[i - 1].count) {
        throw Error(Errc::kValidation, "box counts must be non-decreasing as delta shrinks");
      }
    }
  }
}

void FractalFamily::validate() const {
  if (branches < 1) throw Error(Errc::kValidation, "branches must be >= 1");
  if (scale < 2) throw Error(Errc::kValidation, "scale must be >= 2");
  if (iterations < 1) throw Error(Errc::kValidation, "iterations must be >= 1");
  if (embedding_dimension < 1) throw Error(Errc::kValidation, "embedding dimension must be >= 1");
  const bool four_thirds = branches == 4 && scale == 3 && embedding_dimension == 1;
  std::uint64_t cap = 0;
  if (!four_thirds && checked_pow(scale, embedding_dimension, &cap) && branches > cap) {
    throw Error(Errc::kValidation, "branches exceed scale^embedding_dimension");
  }
}

BoxCountSeries family_counts(const FractalFamily& family) {
  family.validate();
  std::vector<BoxCountPoint> points;
  for (std::uint32_t m = 1; m <= family.iterations; ++m) {
    std::uint64_t count = 0;
    std::uint64_t cells = 0;
    if (!checked_pow(family.branches, m, &count) || !checked_pow(family.scale, m, &cells)) {
      throw Error(Errc::kOverflow, "counts overflow 64 bits at iteration " + std::to_string(m));
    }
    points.push_back({1.0 / static_cast<double>(cells), count});
  }
  if (points.size() < 2) {
    throw Error(Errc::kValidation, "need at least 2 iterations for a box-count series");
  }
  return BoxCountSeries(std::move(points));
}

std::uint64_t box_count_points(std::span<const std::vector<double>> points, double delta) {
  if (points.empty()) throw Error(Errc::kValidation, "box count of an empty point set");
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw Error(Errc::kValidation, "box edge must lie in (0, 1]");
  }
  const std::size_t dim = points.front().size();
  const auto last_cell = static_cast<std::int64_t>(std::ceil(1.0 / delta)) - 1;
  std::unordered_set<std::vector<std::int64_t>, CellHash> cells;
  std::vector<std::int64_t> cell(dim);
  for (const auto& p : points) {
    if (p.size() != dim) throw Error(Errc::kValidation, "points have differing dimensions");
    for (std::size_t a = 0; a < dim; ++a) {
      if (!(p[a] >= 0.0 && p[a] <= 1.0)) {
        throw Error(Errc::kValidation, "point coordinate outside [0, 1]");
      }
      auto c = static_cast<std::int64_t>(std::floor(p[a] / delta));
      cell[a] = std::min(c, last_cell);
    }
    cells.insert(cell);
  }
  return cells.size();
}

DimensionEstimate estimate_dimension(std::span<const BoxCountPoint> points) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& p : points) {
    if (!(p.delta > 0.0) || p.count == 0) {
      throw Error(Errc::kValidation, "delta and count must be positive");
    }
    x.push_back(std::log(p.delta));
    y.push_back(std::log(static_cast<double>(p.count)));
  }
  const LineFit fit = fit_line(x, y);
  return {-fit.slope, fit.pearson_r, fit.se_slope};
}

DimensionEstimate estimate_dimension(const BoxCountSeries& series) {
  return estimate_dimension(std::span<const BoxCountPoint>(series.points()));
}

std::vector<std::vector<double>> cantor_points(std::uint32_t iterations) {
  // Left ends of the retained intervals, built level by level.
  std::vector<double> left{0.0};
  double width = 1.0;
  for (std::uint32_t m = 0; m < iterations; ++m) {
    width /= 3.0;
    std::vector<double> next;
    next.reserve(left.size() * 2);
    for (double l : left) {
      next.push_back(l);
      next.push_back(l + 2.0 * width);
    }
    left = std::move(next);
  }
  std::vector<std::vector<double>> out;
  out.reserve(left.size());
  for (double l : left) out.push_back({l + 0.5 * width});
  return out;
}

std::string series_to_csv(std::span<const BoxCountPoint> points) {
  std::string out = "delta,count\n";
  char buf[64];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.17g", p.delta);
    out += buf;
    out += ',';
    out += std::to_string(p.count);
    out += '\n';
  }
  return out;
}

std::vector<BoxCountPoint> series_from_csv(const std::string& text) {
  std::vector<BoxCountPoint> out;
  bool first = true;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const bool header = first && looks_like_header(line);
    first = false;
    if (header) return;
    const auto fields = split(line, ',');
    BoxCountPoint p{};
    if (fields.size() != 2 || !parse_field(fields[0], &p.delta) ||
        !parse_field(fields[1], &p.count)) {
      throw Error(Errc::kSyntax, "malformed series CSV at line " + std::to_string(line_no) +
                                     ": expected 'delta,count'");
    }
    out.push_back(p);
  });
  return out;
}

std::vector<std::vector<double>> points_from_csv(const std::string& text) {
  std::vector<std::vector<double>> out;
  bool first = true;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const bool header = first && looks_like_header(line);
    first = false;
    if (header) return;
    std::vector<double> row;
    for (auto f : split(line, ',')) {
      double v = 0.0;
      if (!parse_field(f, &v)) {
        throw Error(Errc::kSyntax, "malformed points CSV at line " + std::to_string(line_no) +
                                       ": '" + std::string(trim(f)) + "' is not a number");
      }
      row.push_back(v);
    }
    if (!out.empty() && row.size() != out.front().size()) {
      throw Error(Errc::kSyntax, "malformed points CSV at line " + std::to_string(line_no) +
                                     ": expected " + std::to_string(out.front().size()) +
                                     " columns");
    }
    out.push_back(std::move(row));
  });
  return out;
}

}  // namespace chaoscope
