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

#ifndef SCENEFUZZ_CORE_COVERAGE_GRID_H_
#define SCENEFUZZ_CORE_COVERAGE_GRID_H_

// Trajectory coverage over a driving area diced into square blocks.
//
// Coverage semantics. The ego footprint is an oriented rectangle. Between two
// consecutive trajectory samples the pose is linearly interpolated (heading
// along the shorter arc) with enough sub-steps that no footprint corner moves
// more than half a block. A block counts as covered when any of its
// sub-sample points lies inside the footprint at one of those poses. Each
// block carries an m x m lattice of sub-sample points at cell centres, with
// m = ceil(block_size / 0.05), i.e. a sampling pitch of at most 5 cm.
// Sub-sample points outside the driving area never count, so partial edge
// blocks only collect the part of the footprint inside the area. A
// zero-size footprint degenerates to the block containing the pose.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "scenefuzz/scenario.h"

namespace scenefuzz {

using BlockIndex = uint32_t;

struct TrajectorySample {
  double time = 0.0;  // seconds
  double easting = 0.0;
  double northing = 0.0;
  double heading = 0.0;
  double speed = 0.0;  // m/s
  friend bool operator==(const TrajectorySample&,
                         const TrajectorySample&) = default;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct NoveltyReport {
  std::vector<BlockIndex> new_blocks;  // ascending
  size_t new_count = 0;
  size_t total_after = 0;
};

class DegenerateArea : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
class IndexOutOfRange : public std::out_of_range {
  using std::out_of_range::out_of_range;
};

inline constexpr double kDefaultBlockSize = 1.0;
inline constexpr double kCoverageSamplePitch = 0.05;

class CoverageGrid {
 public:
  // Throws DegenerateArea when the area has no extent and
  // std::invalid_argument when block_size is not positive.
  static CoverageGrid FromArea(const DrivingArea& area,
                               double block_size = kDefaultBlockSize);

  const DrivingArea& area() const { return area_; }
  double block_size() const { return block_size_; }
  int cols() const { return cols_; }
  int rows() const { return rows_; }
  size_t block_count() const {
    return static_cast<size_t>(cols_) * static_cast<size_t>(rows_);
  }
  // Sub-sample lattice points per block side.
  int subsamples() const { return subsamples_; }

  BlockIndex Index(int col, int row) const {
    return static_cast<BlockIndex>(row) * static_cast<BlockIndex>(cols_) +
           static_cast<BlockIndex>(col);
  }
  int ColOf(BlockIndex b) const { return static_cast<int>(b % cols_); }
  int RowOf(BlockIndex b) const { return static_cast<int>(b / cols_); }

  bool IsCovered(BlockIndex b) const;
  size_t covered_count() const { return covered_count_; }

  // ORs `blocks` into the covered set. Throws IndexOutOfRange, leaving the
  // grid untouched, if any index is outside the grid.
  NoveltyReport Update(std::span<const BlockIndex> blocks);

 private:
  CoverageGrid(const DrivingArea& area, double block_size, int cols, int rows);

  DrivingArea area_;
  double block_size_;
  int cols_;
  int rows_;
  int subsamples_;
  std::vector<uint64_t> bits_;
  size_t covered_count_ = 0;
};

struct FootprintSize {
  double length = kEgoDimensions.length;
  double width = kEgoDimensions.width;
};

// Blocks touched by the swept footprint, ascending and unique.
std::vector<BlockIndex> BlocksOfTrajectory(const Trajectory& trajectory,
                                           const CoverageGrid& grid,
                                           FootprintSize footprint = {});

// Number of interpolation sub-steps between two consecutive samples: the
// smallest n >= 1 with (distance + |dheading| * half_diagonal) / n <= b / 2.
int InterpolationSteps(const TrajectorySample& a, const TrajectorySample& b,
                       FootprintSize footprint, double block_size);

}  // namespace scenefuzz

#endif  // SCENEFUZZ_CORE_COVERAGE_GRID_H_
