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

#include "chaoscope/regression.hpp"

#include <cmath>
#include <string>

#include "chaoscope/error.hpp"

namespace chaoscope {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(Errc::kValidation, "regression needs equally many abscissae and ordinates");
  }
  const std::size_t n = x.size();
  if (n < 2) {
    throw Error(Errc::kDegenerate, "regression needs at least 2 points, got " + std::to_string(n));
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw Error(Errc::kValidation, "regression point " + std::to_string(i) + " is not finite");
    }
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0)) {
    throw Error(Errc::kDegenerate, "regression abscissae are all equal");
  }

  LineFit fit{};
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.pearson_r = syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
  if (fit.pearson_r > 1.0) fit.pearson_r = 1.0;
  if (fit.pearson_r < -1.0) fit.pearson_r = -1.0;
  if (n > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - (fit.intercept + fit.slope * x[i]);
      ssr += r * r;
    }
    fit.se_slope = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  }
  return fit;
}

}  // namespace chaoscope
