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

#include "chaoscope/projection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "chaoscope/error.hpp"

namespace chaoscope {
namespace {

std::size_t kept_in(std::size_t len, std::size_t stride) {
  if (len <= 1) return len;
  return (len - 2) / stride + 2;
}

std::size_t kept_total(const Segments& segs, std::size_t stride) {
  std::size_t n = 0;
  for (const auto& s : segs) n += kept_in(s.size(), stride);
  return n;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

Segments project(const Trajectory& traj, std::size_t ix, std::size_t iy,
                 const std::optional<Window>& window) {
  Segments out;
  bool open = false;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto& s = traj.states[i];
    if (ix >= s.size() || iy >= s.size()) {
      throw Error(Errc::kValidation, "projection axis out of range");
    }
    const double x = s[ix];
    const double y = s[iy];
    if (window && !window->contains(x, y)) {
      open = false;
      continue;
    }
    if (!open) {
      out.emplace_back();
      open = true;
    }
    out.back().push_back({traj.times[i], x, y});
  }
  return out;
}

Segments decimate(const Segments& segments, std::size_t max_points) {
  if (max_points == 0) throw Error(Errc::kValidation, "decimation limit must be positive");
  std::size_t longest = 1;
  for (const auto& s : segments) longest = std::max(longest, s.size());
  // kept_total is non-increasing in the stride.
  std::size_t lo = 1;
  std::size_t hi = longest;
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (kept_total(segments, mid) <= max_points) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  const std::size_t stride = lo;
  if (stride == 1) return segments;
  Segments out;
  out.reserve(segments.size());
  for (const auto& s : segments) {
    std::vector<ProjectedSample> d;
    for (std::size_t i = 0; i + 1 < s.size(); i += stride) d.push_back(s[i]);
    d.push_back(s.back());
    out.push_back(std::move(d));
  }
  return out;
}

Window parse_window(const std::string& text) {
  double v[4];
  std::size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    std::size_t end = text.find(',', pos);
    if ((i < 3) != (end != std::string::npos)) {
      throw Error(Errc::kValidation, "window must be xlo,xhi,ylo,yhi");
    }
    std::string field = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    char* stop = nullptr;
    v[i] = std::strtod(field.c_str(), &stop);
    if (field.empty() || *stop != '\0' || !std::isfinite(v[i])) {
      throw Error(Errc::kValidation, "window bound '" + field + "' is not a finite number");
    }
    pos = end + 1;
  }
  if (!(v[0] <= v[1]) || !(v[2] <= v[3])) {
    throw Error(Errc::kValidation, "window bounds must satisfy lo <= hi");
  }
  return {v[0], v[1], v[2], v[3]};
}

std::string projection_svg(const std::vector<Trajectory>& trajs, std::size_t ix, std::size_t iy,
                           const std::string& x_name, const std::string& y_name,
                           const std::vector<std::string>& labels) {
  constexpr double kW = 640, kH = 480, kM = 48;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& t : trajs) {
    for (const auto& s : t.states) {
      if (!std::isfinite(s[ix]) || !std::isfinite(s[iy])) continue;
      xmin = std::min(xmin, s[ix]);
      xmax = std::max(xmax, s[ix]);
      ymin = std::min(ymin, s[iy]);
      ymax = std::max(ymax, s[iy]);
    }
  }
  if (!(xmin <= xmax)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmin -= 0.5, xmax += 0.5;
  if (ymax == ymin) ymin -= 0.5, ymax += 0.5;
  auto px = [&](double x) { return kM + (x - xmin) / (xmax - xmin) * (kW - 2 * kM); };
  auto py = [&](double y) { return kH - kM - (y - ymin) / (ymax - ymin) * (kH - 2 * kM); };

  std::string out =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
      "viewBox=\"0 0 640 480\">\n"
      "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n"
      "<rect x=\"48\" y=\"48\" width=\"544\" height=\"384\" fill=\"none\" stroke=\"black\"/>\n";
  const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                           "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    std::string colour = palette[i % 8];
    if (!labels.empty()) {
      colour = labels[i] == "true" ? "#d62728" : labels[i] == "false" ? "#1f77b4" : "#999999";
    }
    out += "<polyline fill=\"none\" stroke-width=\"0.8\" stroke=\"" + colour + "\" points=\"";
    for (const auto& s : trajs[i].states) {
      if (!std::isfinite(s[ix]) || !std::isfinite(s[iy])) break;
      out += fmt_short(px(s[ix])) + "," + fmt_short(py(s[iy])) + " ";
    }
    out += "\"/>\n";
  }
  out += "<text x=\"320\" y=\"470\" text-anchor=\"middle\" font-size=\"14\">" + x_name + "</text>\n";
  out += "<text x=\"14\" y=\"240\" text-anchor=\"middle\" font-size=\"14\" "
         "transform=\"rotate(-90 14 240)\">" + y_name + "</text>\n";
  out += "<text x=\"48\" y=\"446\" font-size=\"10\">" + fmt_short(xmin) + "</text>\n";
  out += "<text x=\"592\" y=\"446\" font-size=\"10\" text-anchor=\"end\">" + fmt_short(xmax) + "</text>\n";
  out += "<text x=\"44\" y=\"432\" font-size=\"10\" text-anchor=\"end\">" + fmt_short(ymin) + "</text>\n";
  out += "<text x=\"44\" y=\"56\" font-size=\"10\" text-anchor=\"end\">" + fmt_short(ymax) + "</text>\n";
  out += "</svg>\n";
  return out;
}

std::string projection_csv(const std::vector<Trajectory>& trajs, std::size_t ix, std::size_t iy,
                           const std::string& x_name, const std::string& y_name) {
  std::string out = "orbit,t," + x_name + "," + y_name + "\n";
  for (const auto& t : trajs) {
    for (std::size_t i = 0; i < t.times.size(); ++i) {
      out += std::to_string(t.ic_index) + "," + fmt(t.times[i]) + "," + fmt(t.states[i][ix]) + "," +
             fmt(t.states[i][iy]) + "\n";
    }
  }
  return out;
}

}  // namespace chaoscope
