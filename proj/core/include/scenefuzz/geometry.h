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

#ifndef SCENEFUZZ_CORE_GEOMETRY_H_
#define SCENEFUZZ_CORE_GEOMETRY_H_

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace scenefuzz {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double Dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double Cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double Norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline Vec2 UnitFromHeading(double heading) {
  return {std::cos(heading), std::sin(heading)};
}
// Left-hand normal of a direction.
inline Vec2 LeftNormal(Vec2 d) { return {-d.y, d.x}; }

// Wraps an angle into (-pi, pi].
double NormalizeAngle(double angle);

// Rectangle of `length` along `heading` and `width` across it, centred on
// `center`.
struct OrientedRect {
  Vec2 center;
  double heading = 0.0;
  double length = 0.0;
  double width = 0.0;

  // Counter-clockwise: front-left, rear-left, rear-right, front-right.
  std::array<Vec2, 4> Corners() const;
  bool Contains(Vec2 p) const;
};

// Closed-set overlap test by the separating axis theorem: rectangles that
// merely touch overlap.
bool RectsOverlap(const OrientedRect& a, const OrientedRect& b);

// Euclidean gap between two rectangles; 0 when they overlap.
double RectDistance(const OrientedRect& a, const OrientedRect& b);

double PointSegmentDistance(Vec2 p, Vec2 a, Vec2 b);

using Polygon = std::vector<Vec2>;

// Intersection of two convex polygons given counter-clockwise
// (Sutherland-Hodgman). Empty when they are disjoint.
Polygon ClipConvex(const Polygon& subject, const Polygon& clip);

// Area centroid; falls back to the vertex mean for degenerate polygons.
Vec2 Centroid(const Polygon& poly);

}  // namespace scenefuzz

#endif  // SCENEFUZZ_CORE_GEOMETRY_H_
