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

#ifndef SCENEFUZZ_CORE_SIM_INTERFACE_H_
#define SCENEFUZZ_CORE_SIM_INTERFACE_H_

// The contract between the fuzzing loop and a driving simulator: one call
// runs one test case and reports the ego trajectory, collisions, liability
// verdicts and rule violations.

#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "scenefuzz/coverage_grid.h"
#include "scenefuzz/scenario.h"

namespace scenefuzz {

inline constexpr double kDefaultHorizon = 60.0;  // seconds
// Reported as min_obstacle_distance when nothing was ever near the ego.
inline constexpr double kDistanceCap = 1000.0;  // meters
inline constexpr std::string_view kEgoId = "ego";
inline constexpr std::string_view kStaticParty = "static";

struct CrashEvent {
  double time = 0.0;
  std::string party_a;
  std::string party_b;
  GeoPoint contact_point;
  double relative_speed_kmh = 0.0;
  friend bool operator==(const CrashEvent&, const CrashEvent&) = default;
};

// Liability rules, applied first-match in this order:
//   L1  ego crossed a solid double yellow line, or ran a red light it could
//       have stopped for, within 5 s before impact      -> ego at fault
//   L2  ego struck a stationary object, or the rear of a vehicle in its own
//       lane                                            -> ego at fault
//   L3  an NPC struck the ego's rear, or entered the ego's lane within 1.5 s
//       before impact                                   -> ego not at fault
//   L4  anything else                                   -> ego at fault
//   N0  crash between two NPCs                          -> ego not at fault
inline constexpr std::string_view kLiabilityRules[] = {"L1", "L2", "L3", "L4",
                                                       "N0"};

struct LiabilityVerdict {
  size_t crash_index = 0;
  bool ego_at_fault = true;
  std::string rule;
  std::string narrative;
  friend bool operator==(const LiabilityVerdict&,
                         const LiabilityVerdict&) = default;
};

// Violation kinds.
inline constexpr std::string_view kRedLight = "red_light";
inline constexpr std::string_view kDoubleYellowCrossing =
    "double_yellow_crossing";
inline constexpr std::string_view kOffRoad = "off_road";
inline constexpr std::string_view kNpcCollision = "npc_collision";

struct RuleViolation {
  std::string kind;
  double time = 0.0;
  std::string agent;
  std::string detail;
  friend bool operator==(const RuleViolation&, const RuleViolation&) = default;
};

enum class Completion { kReachedGoal, kTimedOut, kCollided };
std::string_view CompletionName(Completion c);

struct SimOutcome {
  Trajectory trajectory;
  std::vector<CrashEvent> crashes;  // ego-involved contacts only
  std::vector<LiabilityVerdict> verdicts;  // one per crash, same order
  double min_obstacle_distance = kDistanceCap;
  std::vector<RuleViolation> violations;
  Completion completed = Completion::kTimedOut;
  // Host seconds spent; informational, excluded from serialization.
  double wall_time = 0.0;

  bool HasCrash() const { return !crashes.empty(); }
};

// Canonical JSON (sorted keys, shortest round-trip doubles). wall_time is
// omitted so that identical runs serialize identically.
nlohmann::json OutcomeToJson(const SimOutcome& outcome);
SimOutcome OutcomeFromJson(const nlohmann::json& doc);
std::string SerializeOutcome(const SimOutcome& outcome);

nlohmann::json CrashToJson(const CrashEvent& crash);
CrashEvent CrashFromJson(const nlohmann::json& doc);

class SimulatorError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class SimulatorUnavailable : public SimulatorError {
  using SimulatorError::SimulatorError;
};
class ProtocolError : public SimulatorError {
  using SimulatorError::SimulatorError;
};
class ScenarioRejected : public SimulatorError {
  using SimulatorError::SimulatorError;
};

class Simulator {
 public:
  virtual ~Simulator() = default;

  // Runs `test_case` until the ego reaches its goal, first collides, or
  // `horizon` seconds elapse. Must be deterministic in (test_case, horizon).
  virtual SimOutcome Run(const TestCase& test_case,
                         double horizon = kDefaultHorizon) = 0;

  // True when Run may be called concurrently from several threads.
  virtual bool ThreadSafe() const { return false; }
};

}  // namespace scenefuzz

#endif  // SCENEFUZZ_CORE_SIM_INTERFACE_H_
