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

#include "scenefuzz/geometry.h"

#include <algorithm>
#include <limits>

namespace scenefuzz {

double NormalizeAngle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  if (a > std::numbers::pi) a -= kTwoPi;
  return a;
}

std::array<Vec2, 4> OrientedRect::Corners() const {
  const Vec2 u = UnitFromHeading(heading);
  const Vec2 v = LeftNormal(u);
  const Vec2 hu = (length / 2.0) * u;
  const Vec2 hv = (width / 2.0) * v;
  return {center + hu + hv, center - hu + hv, center - hu - hv,
          center + hu - hv};
}

bool OrientedRect::Contains(Vec2 p) const {
  const Vec2 u = UnitFromHeading(heading);
  const Vec2 d = p - center;
  return std::abs(Dot(d, u)) <= length / 2.0 &&
         std::abs(Cross(u, d)) <= width / 2.0;
}

namespace {

// Projection interval of a rectangle onto a unit axis.
std::pair<double, double> Project(const std::array<Vec2, 4>& corners,
                                  Vec2 axis) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Vec2& c : corners) {
    const double p = Dot(c, axis);
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  return {lo, hi};
}

}  // namespace

bool RectsOverlap(const OrientedRect& a, const OrientedRect& b) {
  const auto ca = a.Corners();
  const auto cb = b.Corners();
  const Vec2 ua = UnitFromHeading(a.heading);
  const Vec2 ub = UnitFromHeading(b.heading);
  for (Vec2 axis : {ua, LeftNormal(ua), ub, LeftNormal(ub)}) {
    const auto [alo, ahi] = Project(ca, axis);
    const auto [blo, bhi] = Project(cb, axis);
    if (ahi < blo || bhi < alo) return false;
  }
  return true;
}

double PointSegmentDistance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = Dot(ab, ab);
  double t = len2 > 0.0 ? Dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return Norm(p - (a + t * ab));
}

double RectDistance(const OrientedRect& a, const OrientedRect& b) {
  if (RectsOverlap(a, b)) return 0.0;
  const auto ca = a.Corners();
  const auto cb = b.Corners();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      best = std::min(best, PointSegmentDistance(ca[i], cb[j], cb[(j + 1) % 4]));
      best = std::min(best, PointSegmentDistance(cb[i], ca[j], ca[(j + 1) % 4]));
    }
  }
  return best;
}

Polygon ClipConvex(const Polygon& subject, const Polygon& clip) {
  Polygon out = subject;
  for (size_t i = 0; i < clip.size() && !out.empty(); ++i) {
    const Vec2 a = clip[i];
    const Vec2 b = clip[(i + 1) % clip.size()];
    const auto inside = [&](Vec2 p) { return Cross(b - a, p - a) >= 0.0; };
    Polygon in = std::move(out);
    out.clear();
    for (size_t j = 0; j < in.size(); ++j) {
      const Vec2 p = in[j];
      const Vec2 q = in[(j + 1) % in.size()];
      const bool pin = inside(p);
      const bool qin = inside(q);
      if (pin) out.push_back(p);
      if (pin != qin) {
        const double dp = Cross(b - a, p - a);
        const double dq = Cross(b - a, q - a);
        const double t = dp / (dp - dq);
        out.push_back(p + t * (q - p));
      }
    }
  }
  return out;
}

Vec2 Centroid(const Polygon& poly) {
  if (poly.empty()) return {};
  double area2 = 0.0;
  Vec2 acc;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec2 p = poly[i];
    const Vec2 q = poly[(i + 1) % poly.size()];
    const double c = Cross(p, q);
    area2 += c;
    acc = acc + c * (p + q);
  }
  if (std::abs(area2) < 1e-12) {
    Vec2 mean;
    for (const Vec2& p : poly) mean = mean + p;
    return (1.0 / static_cast<double>(poly.size())) * mean;
  }
  return (1.0 / (3.0 * area2)) * acc;
}

}  // namespace scenefuzz
