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

#ifndef SCENEFUZZ_CORE_LANE_MAP_H_
#define SCENEFUZZ_CORE_LANE_MAP_H_

// Straight-lane road map in the local frame of a driving area (origin at the
// area's minimum corner, x east, y north).
//
// The built-in map: an east-west road through the middle of the area with two
// eastbound lanes and one westbound lane, separated by a solid double yellow
// line, crossed at mid-width by a two-lane north-south road. The crossing is
// signalized by light "tl_0", which governs east-west traffic.
//
//        y = H/2 + 3.5  -------------------- solid white
//   W1   westbound      <-------
//        y = H/2        ==========  ======== solid double yellow
//   E2   eastbound      ------->
//        y = H/2 - 3.5  - - - - -  - - - - - dashed white
//   E1   eastbound      ------->
//        y = H/2 - 7    -------------------- solid white

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scenefuzz/geometry.h"

namespace scenefuzz {

enum class BoundaryType { kDashedWhite, kSolidWhite, kSolidDoubleYellow };
std::string_view BoundaryTypeName(BoundaryType type);

struct Lane {
  std::string id;
  Vec2 start;  // centreline, in the lane's direction of travel
  Vec2 end;
  double width = 3.5;
  int left_neighbor = -1;  // lane index, -1 when none
  int left_boundary = -1;  // boundary index between this lane and its left

  Vec2 Direction() const;
  double Length() const { return Norm(end - start); }
  // Station along the centreline and signed offset to the left of it.
  double StationOf(Vec2 p) const { return Dot(p - start, Direction()); }
  double OffsetOf(Vec2 p) const {
    return Dot(p - start, LeftNormal(Direction()));
  }
  Vec2 PointAt(double station) const { return start + station * Direction(); }
  bool Contains(Vec2 p) const;
  OrientedRect Area() const;
};

struct Boundary {
  Vec2 a;
  Vec2 b;
  BoundaryType type = BoundaryType::kSolidWhite;
};

// Traffic moving along `direction` must stop before `line_station`
// (measured as Dot(p, direction)) while the light is red. Applies to agents
// whose lateral coordinate Dot(p, LeftNormal(direction)) lies in
// [lateral_min, lateral_max].
struct StopLine {
  Vec2 direction;
  double line_station = 0.0;
  double lateral_min = 0.0;
  double lateral_max = 0.0;

  double StationOf(Vec2 p) const { return Dot(p, direction); }
  bool Governs(Vec2 p, double heading) const;
};

struct Intersection {
  Polygon region;  // counter-clockwise
  std::string light_id;
  std::vector<StopLine> stop_lines;
};

class LaneMap {
 public:
  // Smallest area the built-in map fits in.
  static constexpr double kMinWidth = 40.0;
  static constexpr double kMinHeight = 20.0;
  static constexpr double kLaneWidth = 3.5;

  // Throws std::invalid_argument when the area is smaller than the minimum.
  static LaneMap BuiltIn(double width, double height);

  const std::vector<Lane>& lanes() const { return lanes_; }
  const std::vector<Boundary>& boundaries() const { return boundaries_; }
  const std::vector<Intersection>& intersections() const {
    return intersections_;
  }
  double width() const { return width_; }
  double height() const { return height_; }

  // First lane containing `p` whose direction is within 90 degrees of
  // `heading`.
  std::optional<int> LaneAlong(Vec2 p, double heading) const;
  // True when `p` lies on any lane.
  bool OnRoad(Vec2 p) const;
  // Index of `id`, or -1.
  int LaneIndex(std::string_view id) const;

 private:
  std::vector<Lane> lanes_;
  std::vector<Boundary> boundaries_;
  std::vector<Intersection> intersections_;
  double width_ = 0.0;
  double height_ = 0.0;
};

}  // namespace scenefuzz

#endif  // SCENEFUZZ_CORE_LANE_MAP_H_
