// Copyright 2026 The SceneFuzz Authors.
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


#ifndef SCENEFUZZ_TESTS_COVERAGE_ORACLE_H_
#define SCENEFUZZ_TESTS_COVERAGE_ORACLE_H_

// Brute-force reference for BlocksOfTrajectory: every interpolated pose tests
// every sub-sample point of its bounding box. Shares only the pose schedule
// (InterpolationSteps) with the code under test.

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "scenefuzz/coverage_grid.h"

namespace scenefuzz::testing {

inline std::vector<BlockIndex> OracleBlocks(const Trajectory& trajectory,
                                            const CoverageGrid& grid,
                                            FootprintSize footprint = {}) {
  const double w = grid.area().Width();
  const double h = grid.area().Height();
  const int m = grid.subsamples();
  const double pitch = grid.block_size() / m;
  std::set<BlockIndex> hit;

  auto stamp = [&](double e, double n, double heading) {
    const double cx = e - grid.area().min_easting;
    const double cy = n - grid.area().min_northing;
    const double c = std::cos(heading), s = std::sin(heading);
    const double hl = footprint.length / 2.0, hw = footprint.width / 2.0;
    const double rx = std::abs(c) * hl + std::abs(s) * hw;
    const double ry = std::abs(s) * hl + std::abs(c) * hw;
    const long k0 = std::max(0L, static_cast<long>((cx - rx) / pitch) - 2);
    const long j0 = std::max(0L, static_cast<long>((cy - ry) / pitch) - 2);
    const long k1 = static_cast<long>((cx + rx) / pitch) + 2;
    const long j1 = static_cast<long>((cy + ry) / pitch) + 2;
    for (long j = j0; j <= j1; ++j) {
      const double py = (j + 0.5) * pitch;
      if (py > h || j / m >= grid.rows()) break;
      for (long k = k0; k <= k1; ++k) {
        const double px = (k + 0.5) * pitch;
        if (px > w || k / m >= grid.cols()) break;
        const double dx = px - cx, dy = py - cy;
        if (std::abs(dx * c + dy * s) <= hl && std::abs(c * dy - s * dx) <= hw) {
          hit.insert(grid.Index(static_cast<int>(k / m), static_cast<int>(j / m)));
        }
      }
    }
  };

  const auto& p = trajectory.samples;
  if (p.empty()) return {};
  stamp(p[0].easting, p[0].northing, p[0].heading);
  for (size_t i = 1; i < p.size(); ++i) {
    const int n = InterpolationSteps(p[i - 1], p[i], footprint, grid.block_size());
    const double dtheta = std::remainder(p[i].heading - p[i - 1].heading,
                                         2.0 * M_PI);
    for (int k = 1; k <= n; ++k) {
      const double t = static_cast<double>(k) / n;
      stamp(p[i - 1].easting + t * (p[i].easting - p[i - 1].easting),
            p[i - 1].northing + t * (p[i].northing - p[i - 1].northing),
            p[i - 1].heading + t * dtheta);
    }
  }
  return {hit.begin(), hit.end()};
}

}  // namespace scenefuzz::testing

#endif  // SCENEFUZZ_TESTS_COVERAGE_ORACLE_H_
