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
#include <optional>
#include <string>
#include <vector>

#include "chaoscope/integrate.hpp"

namespace chaoscope {

// Closed rectangle in a 2-D projection.
struct Window {
  double xlo, xhi, ylo, yhi;

  bool contains(double x, double y) const { return x >= xlo && x <= xhi && y >= ylo && y <= yhi; }
};

struct ProjectedSample {
  double t, x, y;
};

// Maximal runs of consecutive in-window samples of one orbit.
using Segments = std::vector<std::vector<ProjectedSample>>;

// Samples of traj on axes (ix, iy), split into runs of consecutive samples
// inside window (all samples when no window is given).
Segments project(const Trajectory& traj, std::size_t ix, std::size_t iy,
                 const std::optional<Window>& window);

// Keeps every s-th sample of each segment plus its last one, with the
// smallest stride s that leaves at most max_points in total. Segment end
// points are always kept, so when there are more than max_points / 2
// segments the result can exceed max_points.
Segments decimate(const Segments& segments, std::size_t max_points);

// "xlo,xhi,ylo,yhi"; throws Error(kValidation).
Window parse_window(const std::string& text);

// Static SVG with one polyline per orbit; labels select the stroke colour
// ("true", "false", anything else grey). labels may be empty.
std::string projection_svg(const std::vector<Trajectory>& trajs, std::size_t ix, std::size_t iy,
                           const std::string& x_name, const std::string& y_name,
                           const std::vector<std::string>& labels);

// "orbit,t,<x_name>,<y_name>" rows for every sample.
std::string projection_csv(const std::vector<Trajectory>& trajs, std::size_t ix, std::size_t iy,
                           const std::string& x_name, const std::string& y_name);

}  // namespace chaoscope
