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
#include <span>

namespace chaoscope {

// Ordinary least-squares fit y = intercept + slope * x.
struct LineFit {
  double slope;
  double intercept;
  double se_slope;   // standard error of the slope; 0 for two points
  double pearson_r;  // 0 when either variable has zero variance
  std::size_t n;
};

// Requires at least two points and non-constant abscissae; throws
// Error(kDegenerate) otherwise.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace chaoscope
