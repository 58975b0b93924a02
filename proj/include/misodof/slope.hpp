// SPDX-License-Identifier: Apache-2.0
//
// misodof: degrees-of-freedom laboratory for the K-user MISO broadcast
// channel with delayed and imperfect current CSIT.

#ifndef MISODOF_SLOPE_HPP
#define MISODOF_SLOPE_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace misodof {

/// Ordinary least squares line fit. Slope claims in this project are all of
/// the form "log quantity vs log P has slope x"; this is the shared harness.
struct SlopeEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  std::vector<std::pair<double, double>> points;  // (x, y) pairs used
};

inline SlopeEstimate fit_line(const std::vector<std::pair<double, double>>& points) {
  const std::size_t n = points.size();
  if (n < 2) throw std::invalid_argument("fit_line: need at least 2 points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : points) {
    sx += x;
    sy += y;
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  SlopeEstimate est;
  est.slope = sxy / sxx;
  est.intercept = my - est.slope * mx;
  double ssr = 0.0;
  for (const auto& [x, y] : points) {
    const double r = y - (est.intercept + est.slope * x);
    ssr += r * r;
  }
  est.stderr_slope = n > 2 ? std::sqrt(ssr / (static_cast<double>(n) - 2.0) / sxx) : 0.0;
  est.points = points;
  return est;
}

}  // namespace misodof

#endif  // MISODOF_SLOPE_HPP
