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

#include "scenefuzz/lane_map.h"

#include <cmath>
#include <stdexcept>

namespace scenefuzz {

std::string_view BoundaryTypeName(BoundaryType type) {
  switch (type) {
    case BoundaryType::kDashedWhite:
      return "dashed_white";
    case BoundaryType::kSolidWhite:
      return "solid_white";
    case BoundaryType::kSolidDoubleYellow:
      return "solid_double_yellow";
  }
  return "unknown";
}

Vec2 Lane::Direction() const {
  const Vec2 d = end - start;
  const double n = Norm(d);
  return {d.x / n, d.y / n};
}

bool Lane::Contains(Vec2 p) const {
  const double s = StationOf(p);
  return s >= 0.0 && s <= Length() && std::abs(OffsetOf(p)) <= width / 2.0;
}

OrientedRect Lane::Area() const {
  const Vec2 d = end - start;
  return {start + 0.5 * d, std::atan2(d.y, d.x), Norm(d), width};
}

bool StopLine::Governs(Vec2 p, double heading) const {
  if (Dot(UnitFromHeading(heading), direction) < std::cos(std::numbers::pi / 4))
    return false;
  const double lateral = Dot(p, LeftNormal(direction));
  return lateral >= lateral_min && lateral <= lateral_max;
}

LaneMap LaneMap::BuiltIn(double width, double height) {
  if (!(width >= kMinWidth) || !(height >= kMinHeight)) {
    throw std::invalid_argument("driving area too small for the built-in map");
  }
  LaneMap map;
  map.width_ = width;
  map.height_ = height;
  const double w = kLaneWidth;
  const double cy = height / 2.0;
  const double cx = width / 2.0;

  // Boundaries. The double yellow lines are interrupted by the crossing.
  auto& b = map.boundaries_;
  b.push_back({{0, cy - 2 * w}, {width, cy - 2 * w}, BoundaryType::kSolidWhite});
  b.push_back({{0, cy - w}, {width, cy - w}, BoundaryType::kDashedWhite});
  b.push_back({{0, cy}, {cx - w, cy}, BoundaryType::kSolidDoubleYellow});
  b.push_back({{cx + w, cy}, {width, cy}, BoundaryType::kSolidDoubleYellow});
  b.push_back({{0, cy + w}, {width, cy + w}, BoundaryType::kSolidWhite});
  b.push_back({{cx, 0}, {cx, cy - 2 * w}, BoundaryType::kSolidDoubleYellow});
  b.push_back({{cx, cy + w}, {cx, height}, BoundaryType::kSolidDoubleYellow});

  auto& l = map.lanes_;
  l.push_back({"E1", {0, cy - 1.5 * w}, {width, cy - 1.5 * w}, w, 1, 1});
  l.push_back({"E2", {0, cy - 0.5 * w}, {width, cy - 0.5 * w}, w, 2, 2});
  l.push_back({"W1", {width, cy + 0.5 * w}, {0, cy + 0.5 * w}, w, 1, 2});
  l.push_back({"N1", {cx + 0.5 * w, 0}, {cx + 0.5 * w, height}, w, 4, 5});
  l.push_back({"S1", {cx - 0.5 * w, height}, {cx - 0.5 * w, 0}, w, 3, 5});

  Intersection x;
  x.light_id = "tl_0";
  x.region = {{cx - w, cy - 2 * w},
              {cx + w, cy - 2 * w},
              {cx + w, cy + w},
              {cx - w, cy + w}};
  // Eastbound and westbound approaches, spanning the whole carriageway.
  x.stop_lines.push_back({{1, 0}, cx - w - 2.0, cy - 2 * w, cy + w});
  x.stop_lines.push_back({{-1, 0}, -(cx + w + 2.0), -(cy + w), -(cy - 2 * w)});
  map.intersections_.push_back(std::move(x));
  return map;
}

std::optional<int> LaneMap::LaneAlong(Vec2 p, double heading) const {
  const Vec2 u = UnitFromHeading(heading);
  for (size_t i = 0; i < lanes_.size(); ++i) {
    if (lanes_[i].Contains(p) && Dot(lanes_[i].Direction(), u) > 0.0) {
      return static_cast<int>(i);
    }
  }
  return std::nullopt;
}

bool LaneMap::OnRoad(Vec2 p) const {
  for (const Lane& lane : lanes_) {
    if (lane.Contains(p)) return true;
  }
  return false;
}

int LaneMap::LaneIndex(std::string_view id) const {
  for (size_t i = 0; i < lanes_.size(); ++i) {
    if (lanes_[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace scenefuzz
