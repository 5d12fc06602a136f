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

#include "scenefuzz/coverage_grid.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "scenefuzz/geometry.h"

namespace scenefuzz {

CoverageGrid::CoverageGrid(const DrivingArea& area, double block_size,
                           int cols, int rows)
    : area_(area),
      block_size_(block_size),
      cols_(cols),
      rows_(rows),
      subsamples_(static_cast<int>(
          std::ceil(block_size / kCoverageSamplePitch - 1e-9))),
      bits_((static_cast<size_t>(cols) * rows + 63) / 64, 0) {
  if (subsamples_ < 1) subsamples_ = 1;
}

CoverageGrid CoverageGrid::FromArea(const DrivingArea& area,
                                    double block_size) {
  if (!(block_size > 0.0) || !std::isfinite(block_size)) {
    throw std::invalid_argument("block size must be positive");
  }
  const double w = area.Width();
  const double h = area.Height();
  if (!(w > 0.0) || !(h > 0.0) || !std::isfinite(w) || !std::isfinite(h)) {
    throw DegenerateArea("driving area has no extent");
  }
  const double cols = std::ceil(w / block_size);
  const double rows = std::ceil(h / block_size);
  if (cols * rows > static_cast<double>(std::numeric_limits<BlockIndex>::max())) {
    throw std::invalid_argument("grid too large");
  }
  return CoverageGrid(area, block_size, static_cast<int>(cols),
                      static_cast<int>(rows));
}

bool CoverageGrid::IsCovered(BlockIndex b) const {
  if (b >= block_count()) throw IndexOutOfRange("block index out of range");
  return (bits_[b / 64] >> (b % 64)) & 1u;
}

NoveltyReport CoverageGrid::Update(std::span<const BlockIndex> blocks) {
  for (BlockIndex b : blocks) {
    if (b >= block_count()) {
      throw IndexOutOfRange("block index " + std::to_string(b) +
                            " outside grid of " +
                            std::to_string(block_count()));
    }
  }
  NoveltyReport report;
  for (BlockIndex b : blocks) {
    uint64_t& word = bits_[b / 64];
    const uint64_t mask = uint64_t{1} << (b % 64);
    if (word & mask) continue;
    word |= mask;
    report.new_blocks.push_back(b);
  }
  std::sort(report.new_blocks.begin(), report.new_blocks.end());
  covered_count_ += report.new_blocks.size();
  report.new_count = report.new_blocks.size();
  report.total_after = covered_count_;
  return report;
}

int InterpolationSteps(const TrajectorySample& a, const TrajectorySample& b,
                       FootprintSize footprint, double block_size) {
  const double dist = std::hypot(b.easting - a.easting, b.northing - a.northing);
  const double dtheta = std::abs(NormalizeAngle(b.heading - a.heading));
  const double half_diag = std::hypot(footprint.length, footprint.width) / 2.0;
  const double travel = dist + dtheta * half_diag;
  const double n = std::ceil(travel / (block_size / 2.0));
  if (!(n > 1.0)) return 1;
  return static_cast<int>(std::min(n, 1.0e6));
}

namespace {

// Intersects [lo, hi] with the solutions of |a * dx + b| <= half, where dx is
// measured from the rectangle centre. Returns false when a is ~0 and the
// constraint excludes the whole row.
bool ClipRow(double a, double b, double half, double& lo, double& hi) {
  if (std::abs(a) < 1e-12) return std::abs(b) <= half + 1e-9;
  double d0 = (-half - b) / a;
  double d1 = (half - b) / a;
  if (d0 > d1) std::swap(d0, d1);
  lo = std::max(lo, d0);
  hi = std::min(hi, d1);
  return true;
}

// Rasterizes rectangles onto the sub-sample lattice of a grid. Coordinates are
// local: origin at the driving area's min corner.
class LatticeRasterizer {
 public:
  explicit LatticeRasterizer(const CoverageGrid& grid)
      : grid_(grid),
        m_(grid.subsamples()),
        pitch_(grid.block_size() / grid.subsamples()),
        kx_(LatticeExtent(grid.area().Width(), grid.cols())),
        ky_(LatticeExtent(grid.area().Height(), grid.rows())),
        seen_(grid.block_count(), 0) {}

  void AddRect(Vec2 center, double heading, double length, double width) {
    const Vec2 u = UnitFromHeading(heading);
    const double hl = length / 2.0;
    const double hw = width / 2.0;
    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -ymin;
    for (const Vec2& c : OrientedRect{center, heading, length, width}.Corners()) {
      ymin = std::min(ymin, c.y);
      ymax = std::max(ymax, c.y);
    }
    const int64_t j0 = std::max<int64_t>(
        static_cast<int64_t>(std::ceil(ymin / pitch_ - 0.5)) - 1, 0);
    const int64_t j1 = std::min<int64_t>(
        static_cast<int64_t>(std::floor(ymax / pitch_ - 0.5)) + 1, ky_ - 1);
    for (int64_t j = j0; j <= j1; ++j) {
      const double dy = (static_cast<double>(j) + 0.5) * pitch_ - center.y;
      double lo = -std::numeric_limits<double>::infinity();
      double hi = std::numeric_limits<double>::infinity();
      // Along the heading: |dx * ux + dy * uy| <= hl.
      if (!ClipRow(u.x, dy * u.y, hl, lo, hi)) continue;
      // Across it: |ux * dy - uy * dx| <= hw.
      if (!ClipRow(-u.y, u.x * dy, hw, lo, hi)) continue;
      if (lo > hi + pitch_) continue;

      const auto inside = [&](int64_t k) {
        const Vec2 d{(static_cast<double>(k) + 0.5) * pitch_ - center.x, dy};
        return std::abs(Dot(d, u)) <= hl && std::abs(Cross(u, d)) <= hw;
      };
      const double xlo = std::max(center.x + lo, -pitch_);
      const double xhi = std::min(center.x + hi, (kx_ + 1.0) * pitch_);
      int64_t k0 = static_cast<int64_t>(std::ceil(xlo / pitch_ - 0.5)) - 1;
      int64_t k1 = static_cast<int64_t>(std::floor(xhi / pitch_ - 0.5)) + 1;
      k0 = std::max<int64_t>(k0, 0);
      k1 = std::min<int64_t>(k1, kx_ - 1);
      // The interval seeds the search; the point predicate settles the ends.
      while (k0 <= k1 && !inside(k0)) ++k0;
      while (k1 >= k0 && !inside(k1)) --k1;
      if (k0 > k1) continue;
      const int row = static_cast<int>(j / m_);
      for (int64_t c = k0 / m_; c <= k1 / m_; ++c) {
        Mark(grid_.Index(static_cast<int>(c), row));
      }
    }
  }

  void AddPoint(Vec2 p) {
    const double w = grid_.area().Width();
    const double h = grid_.area().Height();
    if (!(p.x >= 0.0 && p.x <= w && p.y >= 0.0 && p.y <= h)) return;
    const int col = std::min(static_cast<int>(p.x / grid_.block_size()),
                             grid_.cols() - 1);
    const int row = std::min(static_cast<int>(p.y / grid_.block_size()),
                             grid_.rows() - 1);
    Mark(grid_.Index(col, row));
  }

  std::vector<BlockIndex> Take() {
    std::sort(out_.begin(), out_.end());
    return std::move(out_);
  }

 private:
  // Number of lattice indices k >= 0 with (k + 0.5) * pitch <= extent.
  int64_t LatticeExtent(double extent, int blocks) const {
    const int64_t cap = static_cast<int64_t>(blocks) * m_;
    int64_t k = std::clamp<int64_t>(
        static_cast<int64_t>(std::floor(extent / pitch_ - 0.5)) + 1, 0, cap);
    while (k > 0 && !((static_cast<double>(k - 1) + 0.5) * pitch_ <= extent)) {
      --k;
    }
    while (k < cap && (static_cast<double>(k) + 0.5) * pitch_ <= extent) ++k;
    return k;
  }

  void Mark(BlockIndex b) {
    if (seen_[b]) return;
    seen_[b] = 1;
    out_.push_back(b);
  }

  const CoverageGrid& grid_;
  int64_t m_;
  double pitch_;
  int64_t kx_;
  int64_t ky_;
  std::vector<char> seen_;
  std::vector<BlockIndex> out_;
};

}  // namespace

std::vector<BlockIndex> BlocksOfTrajectory(const Trajectory& trajectory,
                                           const CoverageGrid& grid,
                                           FootprintSize footprint) {
  LatticeRasterizer raster(grid);
  const DrivingArea& area = grid.area();
  const bool point_mode = !(footprint.length > 0.0) && !(footprint.width > 0.0);
  const auto add = [&](double e, double n, double heading) {
    const Vec2 c{e - area.min_easting, n - area.min_northing};
    if (point_mode) {
      raster.AddPoint(c);
    } else {
      raster.AddRect(c, heading, footprint.length, footprint.width);
    }
  };

  const auto& s = trajectory.samples;
  if (s.empty()) return {};
  add(s[0].easting, s[0].northing, s[0].heading);
  for (size_t i = 1; i < s.size(); ++i) {
    const TrajectorySample& a = s[i - 1];
    const TrajectorySample& b = s[i];
    if (a.easting == b.easting && a.northing == b.northing &&
        a.heading == b.heading) {
      continue;
    }
    const int n = InterpolationSteps(a, b, footprint, grid.block_size());
    const double dtheta = NormalizeAngle(b.heading - a.heading);
    for (int k = 1; k <= n; ++k) {
      const double t = static_cast<double>(k) / n;
      add(a.easting + t * (b.easting - a.easting),
          a.northing + t * (b.northing - a.northing), a.heading + t * dtheta);
    }
  }
  return raster.Take();
}

}  // namespace scenefuzz
