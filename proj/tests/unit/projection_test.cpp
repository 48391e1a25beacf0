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

#include <gtest/gtest.h>

#include "chaoscope/error.hpp"
#include "chaoscope/projection.hpp"

namespace chaoscope {
namespace {

Trajectory zigzag(std::size_t n) {
  Trajectory t;
  for (std::size_t i = 0; i < n; ++i) {
    t.times.push_back(static_cast<double>(i));
    // x cycles 0..9, z constant 1
    t.states.push_back({static_cast<double>(i % 10), 5.0, 1.0});
  }
  return t;
}

TEST(Project, ClosedWindowSplitsIntoSegments) {
  Trajectory t = zigzag(30);
  Window w{2.0, 4.0, 1.0, 1.0};
  Segments s = project(t, 0, 2, w);
  ASSERT_EQ(s.size(), 3u);
  for (const auto& seg : s) {
    ASSERT_EQ(seg.size(), 3u);
    EXPECT_EQ(seg.front().x, 2.0);
    EXPECT_EQ(seg.back().x, 4.0);
    EXPECT_EQ(seg.front().y, 1.0);
  }
  EXPECT_EQ(s[1].front().t, 12.0);
  EXPECT_EQ(project(t, 0, 2, std::nullopt).size(), 1u);
  EXPECT_TRUE(project(t, 0, 2, Window{20, 30, 0, 1}).empty());
  EXPECT_THROW(project(t, 0, 5, std::nullopt), Error);
}

TEST(Decimate, BoundsPointsAndKeepsSegmentEnds) {
  Trajectory t;
  for (int i = 0; i < 1001; ++i) {
    t.times.push_back(i);
    t.states.push_back({double(i), double(i)});
  }
  Segments full = project(t, 0, 1, std::nullopt);
  for (std::size_t k : {2u, 3u, 10u, 99u, 500u, 1000u, 5000u}) {
    Segments d = decimate(full, k);
    ASSERT_EQ(d.size(), 1u);
    EXPECT_LE(d[0].size(), k);
    EXPECT_EQ(d[0].front().t, 0.0);
    EXPECT_EQ(d[0].back().t, 1000.0);
    if (k >= 1001) EXPECT_EQ(d[0].size(), 1001u);
  }
  Trajectory z;
  for (int i = 0; i < 100; ++i) {
    z.times.push_back(i);
    z.states.push_back({double(i % 10), 0.0});
  }
  Segments segs = project(z, 0, 1, Window{0, 4, 0, 0});
  Segments d = decimate(segs, 30);
  ASSERT_EQ(d.size(), segs.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    total += d[i].size();
    EXPECT_EQ(d[i].front().t, segs[i].front().t);
    EXPECT_EQ(d[i].back().t, segs[i].back().t);
  }
  EXPECT_LE(total, 30u);
  EXPECT_THROW(decimate(segs, 0), Error);
}

TEST(ParseWindow, Forms) {
  Window w = parse_window("-10,0,20,30");
  EXPECT_EQ(w.xlo, -10.0);
  EXPECT_EQ(w.yhi, 30.0);
  EXPECT_THROW(parse_window("1,2,3"), Error);
  EXPECT_THROW(parse_window("1,2,3,4,5"), Error);
  EXPECT_THROW(parse_window("2,1,3,4"), Error);
  EXPECT_THROW(parse_window("a,1,3,4"), Error);
}

TEST(ProjectionSvg, OnePolylinePerOrbit) {
  std::vector<Trajectory> ts = {zigzag(20), zigzag(10)};
  std::string svg = projection_svg(ts, 0, 2, "x", "z", {"true", "false"});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  std::size_t count = 0;
  for (std::size_t p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++count;
  EXPECT_EQ(count, 2u);
  EXPECT_NE(svg.find("#d62728"), std::string::npos);
  std::string csv = projection_csv(ts, 0, 2, "x", "z");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "orbit,t,x,z");
}

}  // namespace
}  // namespace chaoscope
