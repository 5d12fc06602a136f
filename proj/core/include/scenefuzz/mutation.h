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

#ifndef SCENEFUZZ_CORE_MUTATION_H_
#define SCENEFUZZ_CORE_MUTATION_H_

// Semantic mutation of a test case's dynamic configuration. Four strategies:
//
//   arithmetic  nudges one numeric field by a fixed step,
//   flip        cycles a light colour or reflects an agent through the centre
//               of the driving area,
//   random      redraws one field uniformly from its working range,
//   insert      adds an agent close to the ego's straight-line route.
//
// Mutants that leave their field's range or fail validation are dropped,
// never clamped or repaired.

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scenefuzz/rng.h"
#include "scenefuzz/scenario.h"

namespace scenefuzz {

enum class MutationStrategy { kArithmetic, kFlip, kRandom, kInsert };

inline constexpr MutationStrategy kAllStrategies[] = {
    MutationStrategy::kArithmetic, MutationStrategy::kFlip,
    MutationStrategy::kRandom, MutationStrategy::kInsert};

std::string_view StrategyName(MutationStrategy strategy);
std::optional<MutationStrategy> StrategyFromName(std::string_view name);

struct MutationConfig {
  double arithmetic_step = 1.0;   // meters, positions
  double speed_step = 0.5;        // m/s
  double environment_step = 0.1;  // unitless
  // Working range for position redraws; the test case's driving area when
  // unset.
  std::optional<DrivingArea> random_position_range;
  double random_speed_min = 0.0;
  double random_speed_max = 20.0;
  size_t batch_size = 8;
  std::vector<AgentKind> insert_kinds = {
      AgentKind::kSedan, AgentKind::kTrafficCone, AgentKind::kPedestrian};
  size_t max_npcs = 10;
  // Indexed by MutationStrategy.
  std::array<double, 4> strategy_weights = {1.0, 1.0, 1.0, 1.0};
  double insert_corridor_width = 6.0;
  int insert_attempts = 20;

  double Weight(MutationStrategy s) const {
    return strategy_weights[static_cast<size_t>(s)];
  }
  // Throws std::invalid_argument on a broken configuration.
  void Check() const;
};

// Addresses one mutable field of the dynamic configuration.
struct MutationTarget {
  enum class Kind {
    kNpcEasting,   // arithmetic
    kNpcNorthing,  // arithmetic
    kNpcPosition,  // flip, random
    kNpcSpeed,     // arithmetic, random
    kEnvironment,  // arithmetic, random; sub indexes EnvironmentField
    kLightColor,   // flip, random; sub indexes the schedule entry
  };
  static constexpr size_t kLaneSpeed = std::numeric_limits<size_t>::max();

  Kind kind = Kind::kNpcEasting;
  size_t index = 0;  // NPC or traffic light
  size_t sub = 0;    // waypoint (kLaneSpeed for lane-follow), env field, phase

  friend bool operator==(const MutationTarget&,
                         const MutationTarget&) = default;
};

enum class EnvironmentField { kLightIntensity, kRain, kFog, kWetness };

class MutationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
// The mutated value left its field's working range.
class OutOfRange : public MutationError {
  using MutationError::MutationError;
};
class PlacementFailed : public MutationError {
  using MutationError::MutationError;
};
class NoApplicableTarget : public MutationError {
  using MutationError::MutationError;
};

std::vector<MutationTarget> ApplicableTargets(const TestCase& test_case,
                                              MutationStrategy strategy,
                                              const MutationConfig& config);

// `sign` is +1 or -1.
TestCase ArithmeticStep(const TestCase& test_case, const MutationTarget& target,
                        int sign, const MutationConfig& config);
TestCase Flip(const TestCase& test_case, const MutationTarget& target,
              const MutationConfig& config);
TestCase RandomReplace(const TestCase& test_case, const MutationTarget& target,
                       const MutationConfig& config, Rng& rng);
TestCase InsertAgent(const TestCase& test_case, const MutationConfig& config,
                     Rng& rng);

LightColor NextFlipColor(LightColor color);

struct MutationBatch {
  std::string parent_id;
  std::vector<TestCase> cases;
  size_t candidates = 0;  // generated before validity filtering
};

// Draws config.batch_size candidates from `parent`. Deterministic in
// (parent, config, rng state). Throws NoApplicableTarget when no strategy has
// anything to act on.
MutationBatch Mutate(const TestCase& parent, const MutationConfig& config,
                     Rng& rng);

}  // namespace scenefuzz

#endif  // SCENEFUZZ_CORE_MUTATION_H_
