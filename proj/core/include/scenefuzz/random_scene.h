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

#ifndef SCENEFUZZ_CORE_RANDOM_SCENE_H_
#define SCENEFUZZ_CORE_RANDOM_SCENE_H_

// Uniformly random dynamic configurations, used for initial seeds, queue
// refills and the random baseline.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "scenefuzz/mutation.h"
#include "scenefuzz/rng.h"
#include "scenefuzz/scenario.h"

namespace scenefuzz {

struct RandomSceneConfig {
  size_t min_npcs = 1;
  size_t max_npcs = 4;
  // Spawn and waypoint range; the driving area when unset.
  std::optional<DrivingArea> position_range;
  double speed_min = 0.0;
  double speed_max = 20.0;
  double pedestrian_speed_max = 3.0;
  size_t max_waypoints = 3;
  std::vector<std::string> light_ids = {"tl_0"};
  double phase_min = 2.0;  // seconds
  double phase_max = 20.0;
  int placement_attempts = 50;

  // Position and speed ranges follow the mutation engine's working ranges.
  static RandomSceneConfig FromMutation(const MutationConfig& mutation);
};

// Every NPC spawns at least kSpawnSeparation from the ego start and from the
// others; an NPC that cannot be placed within placement_attempts draws is
// left out. Traffic cones are always stationary. Each light runs a
// green, yellow, red cycle entered at a random phase.
DynamicConfig RandomDynamicConfig(const StaticConfig& scene,
                                  const RandomSceneConfig& config, Rng& rng);

TestCase RandomTestCase(const StaticConfig& scene,
                        const RandomSceneConfig& config, Rng& rng,
                        std::string case_id);

}  // namespace scenefuzz

#endif  // SCENEFUZZ_CORE_RANDOM_SCENE_H_
