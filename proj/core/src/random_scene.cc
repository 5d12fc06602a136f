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

#include "scenefuzz/random_scene.h"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numbers>

namespace scenefuzz {

RandomSceneConfig RandomSceneConfig::FromMutation(const MutationConfig& m) {
  RandomSceneConfig c;
  c.position_range = m.random_position_range;
  c.speed_min = m.random_speed_min;
  c.speed_max = m.random_speed_max;
  c.pedestrian_speed_max = std::min(c.pedestrian_speed_max, m.random_speed_max);
  return c;
}

DynamicConfig RandomDynamicConfig(const StaticConfig& scene,
                                  const RandomSceneConfig& config, Rng& rng) {
  const DrivingArea range = config.position_range.value_or(scene.driving_area);
  auto draw_point = [&] {
    const double e = rng.Uniform(range.min_easting, range.max_easting);
    const double n = rng.Uniform(range.min_northing, range.max_northing);
    return GeoPoint{e, n};
  };

  DynamicConfig dyn;
  const size_t count = static_cast<size_t>(
      rng.IntIn(static_cast<int64_t>(config.min_npcs),
                static_cast<int64_t>(config.max_npcs)));
  std::vector<GeoPoint> taken = {
      {scene.start_pose.easting, scene.start_pose.northing}};
  for (size_t i = 0; i < count; ++i) {
    NpcAgent npc;
    npc.agent_id = "npc-" + std::to_string(i);
    npc.kind = kAllAgentKinds[rng.Below(std::size(kAllAgentKinds))];
    bool placed = false;
    for (int attempt = 0; attempt < config.placement_attempts; ++attempt) {
      const GeoPoint p = draw_point();
      bool clear = true;
      for (const GeoPoint& q : taken) {
        if (std::hypot(p.easting - q.easting, p.northing - q.northing) <
            kSpawnSeparation) {
          clear = false;
          break;
        }
      }
      if (clear) {
        npc.spawn_pose.easting = p.easting;
        npc.spawn_pose.northing = p.northing;
        placed = true;
        break;
      }
    }
    if (!placed) continue;
    npc.spawn_pose.heading =
        rng.Uniform(-std::numbers::pi, std::numbers::pi);
    if (npc.spawn_pose.heading <= -std::numbers::pi) {
      npc.spawn_pose.heading = std::numbers::pi;
    }
    const double vmax = npc.kind == AgentKind::kPedestrian
                            ? config.pedestrian_speed_max
                            : config.speed_max;
    if (npc.kind != AgentKind::kTrafficCone) {
      switch (rng.Below(2)) {
        case 0:
          npc.behavior = LaneFollow{rng.Uniform(config.speed_min, vmax)};
          break;
        default: {
          WaypointPath path;
          const size_t n = 1 + rng.Below(config.max_waypoints);
          for (size_t k = 0; k < n; ++k) {
            const GeoPoint p = draw_point();
            path.waypoints.push_back(
                {p.easting, p.northing, rng.Uniform(config.speed_min, vmax)});
          }
          npc.behavior = std::move(path);
        }
      }
    }
    taken.push_back({npc.spawn_pose.easting, npc.spawn_pose.northing});
    dyn.npcs.push_back(std::move(npc));
  }

  for (const std::string& id : config.light_ids) {
    TrafficLightPlan plan;
    plan.light_id = id;
    static constexpr LightColor kCycle[] = {
        LightColor::kGreen, LightColor::kYellow, LightColor::kRed};
    const size_t first = rng.Below(3);
    for (size_t k = 0; k < 3; ++k) {
      plan.schedule.push_back({kCycle[(first + k) % 3],
                               rng.Uniform(config.phase_min, config.phase_max)});
    }
    dyn.traffic_lights.push_back(std::move(plan));
  }

  Environment& env = dyn.environment;
  env.light_intensity = rng.Uniform01();
  env.rain = rng.Uniform01();
  env.fog = rng.Uniform01();
  env.wetness = rng.Uniform01();
  return dyn;
}

TestCase RandomTestCase(const StaticConfig& scene,
                        const RandomSceneConfig& config, Rng& rng,
                        std::string case_id) {
  TestCase tc;
  tc.case_id = std::move(case_id);
  tc.static_config = scene;
  tc.dynamic_config = RandomDynamicConfig(scene, config, rng);
  tc.rng_seed = rng.NextU64();
  return tc;
}

}  // namespace scenefuzz
