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

#ifndef SCENEFUZZ_CORE_SIM_KERNEL_H_
#define SCENEFUZZ_CORE_SIM_KERNEL_H_

// Built-in deterministic 2D driving simulator.
//
// All computation happens in the local frame of the driving area (see
// lane_map.h); outcomes are converted back to UTM coordinates. The ego runs a
// rule-based planner that, by design, borrows the left lane around a
// stationary obstacle without checking what kind of line it crosses.
// KernelConfig::fixed_planner adds that check.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scenefuzz/geometry.h"
#include "scenefuzz/lane_map.h"
#include "scenefuzz/scenario.h"
#include "scenefuzz/sim_interface.h"

namespace scenefuzz {

struct KernelConfig {
  double dt = 0.05;  // seconds
  double speed_limit = 11.11;  // m/s, 40 km/h
  double max_accel = 3.0;  // m/s^2
  double max_decel = 3.0;  // m/s^2
  double comfortable_decel = 2.5;  // m/s^2
  double wheelbase = 2.8;
  double max_steer = 0.55;  // rad
  double max_steer_rate = 1.2;  // rad/s
  double min_lookahead = 6.0;  // m
  double lookahead_time = 0.8;  // s
  // range = base * (1 - rain_fog_coeff * max(rain, fog))
  //              * (1 - light_coeff + light_coeff * light_intensity)
  double base_detection_range = 60.0;
  double rain_fog_coeff = 0.5;
  double light_coeff = 0.5;
  double corridor_margin = 0.35;  // beyond the ego's half width
  double stationary_speed = 0.3;  // m/s
  double standstill_gap = 3.0;  // m, kept to a stopped obstacle
  double follow_gap = 5.0;  // m, plus follow_headway * lead speed
  double follow_headway = 1.5;  // s
  double borrow_approach_speed = 6.0;  // m/s
  double borrow_trigger_gap = 8.0;  // m, plus borrow_trigger_headway * v
  double borrow_trigger_headway = 1.5;  // s
  double stop_line_margin = 0.5;  // m
  bool fixed_planner = false;

  // Throws std::invalid_argument on a broken configuration.
  void Check() const;
};

// Perception range under `env`.
double DetectionRange(const Environment& env, const KernelConfig& config);

// Colour of a cyclic schedule at time t >= 0.
LightColor LightColorAt(const TrafficLightPlan& plan, double t);

struct VehicleState {
  Vec2 position;  // footprint centre, local frame
  double heading = 0.0;
  double speed = 0.0;
  double length = kEgoDimensions.length;
  double width = kEgoDimensions.width;
  double steer = 0.0;

  OrientedRect Footprint() const {
    return {position, heading, length, width};
  }
  Vec2 Velocity() const { return speed * UnitFromHeading(heading); }
  Vec2 Front() const {
    return position + (length / 2.0) * UnitFromHeading(heading);
  }
};

// One kinematic bicycle step. `accel` and `steer` are commands; the applied
// steering angle moves towards `steer` at no more than max_steer_rate and is
// bounded by max_steer. Speed never goes negative. Position advances with the
// mean of the old and new speeds.
VehicleState AdvanceBicycle(const VehicleState& state, double accel,
                            double steer, const KernelConfig& config);

// Pure-pursuit steering angle towards `target`.
double PursuitSteer(const VehicleState& state, Vec2 target,
                    const KernelConfig& config);

enum class PlannerMode { kLaneFollow, kStop, kBorrowLeftLane };
std::string_view PlannerModeName(PlannerMode mode);

// What made the planner deviate from cruising.
enum class PlannerCause {
  kCruise,
  kLight,
  kMovingObstacle,
  kStationaryObstacle,
  kBorrow,
};

struct PlannerDecision {
  PlannerMode mode = PlannerMode::kLaneFollow;
  double target_speed = 0.0;  // m/s, reached within one step if possible
  int target_lane = -1;
  PlannerCause cause = PlannerCause::kCruise;
  std::string obstacle_id;  // obstacle that shaped the decision, if any
  std::optional<double> obstacle_gap;
};

struct NpcState {
  std::string id;
  AgentKind kind = AgentKind::kSedan;
  VehicleState body;
  Behavior behavior;
  int lane = -1;  // followed lane for lane-following NPCs
  size_t next_waypoint = 0;
  double waypoint_distance = -1.0;  // at the previous step, -1 before any
  bool halted = false;
};

struct World {
  LaneMap map;
  Vec2 origin;  // driving area minimum corner in UTM
  double time = 0.0;
  int step = 0;
  VehicleState ego;
  Vec2 route_start;
  Vec2 route_end;
  int home_lane = -1;
  int ego_lane = -1;  // lane the ego is currently tracking
  std::string passing_id;  // obstacle being passed while borrowing
  std::vector<NpcState> npcs;
  std::vector<TrafficLightPlan> lights;
  Environment environment;

  Vec2 ToLocal(double easting, double northing) const {
    return {easting - origin.x, northing - origin.y};
  }
  GeoPoint ToGeo(Vec2 p) const { return {origin.x + p.x, origin.y + p.y}; }
  // Colour of the light governing intersection `i`; green without a plan.
  LightColor LightAt(size_t intersection, double t) const;
  double RouteProgress() const;
  double RouteLength() const { return Norm(route_end - route_start); }
};

// Builds the initial world. Throws ScenarioRejected when the area cannot hold
// the built-in map or the ego does not start on a lane facing its heading.
World MakeWorld(const TestCase& test_case, const KernelConfig& config);

PlannerDecision PlanEgo(const World& world, const KernelConfig& config);

// Advances every agent by one timestep: the ego under `decision`, NPCs under
// their scripted behaviours. Light states are a function of world.time.
void StepWorld(World& world, const PlannerDecision& decision,
               const KernelConfig& config);

struct Body {
  std::string id;
  OrientedRect footprint;
  Vec2 velocity;
};

// Contact events for every overlapping pair (i < j), in pair order. Contact
// point is the centroid of the overlap polygon, in the bodies' frame.
std::vector<CrashEvent> DetectCollisions(const std::vector<Body>& bodies,
                                         double time);

// Navigation history consulted by the liability judge.
struct LiabilityHistory {
  struct Interval {
    double begin;
    double end;
  };
  std::vector<Interval> double_yellow;  // ego footprint on a double yellow
  std::vector<double> avoidable_red_runs;  // times the ego ran one
  // Latest time each NPC's footprint entered the ego's lane at impact;
  // absent when it never entered during the run.
  std::vector<std::pair<std::string, double>> lane_entries;
};

struct CrashParty {
  std::string id;
  AgentKind kind = AgentKind::kSedan;
  VehicleState state;
  bool is_ego = false;
};

inline constexpr double kLookbackDoubleYellow = 5.0;  // s
inline constexpr double kLookbackCutIn = 1.5;  // s

// First matching rule of the documented cascade. `ego_lane` is the lane the
// ego occupies at impact (-1 if none). The contact point of `crash` must be
// in the same frame as the parties' states.
LiabilityVerdict JudgeLiability(const CrashEvent& crash, const CrashParty& a,
                                const CrashParty& b,
                                const LiabilityHistory& history,
                                const LaneMap& map, int ego_lane);

// True when `striker` hit the rear of `struck`: the contact lies in the
// struck body's rear quarter, the striker comes from behind, and both face
// within 45 degrees of each other.
bool IsRearImpact(const VehicleState& striker, const VehicleState& struck,
                  Vec2 contact);

struct TraceStep {
  double time = 0.0;
  PlannerDecision decision;
  double detection_range = 0.0;
};

class KernelSimulator : public Simulator {
 public:
  explicit KernelSimulator(KernelConfig config = {});

  SimOutcome Run(const TestCase& test_case,
                 double horizon = kDefaultHorizon) override;
  // As Run, also recording the planner's decision at every step.
  SimOutcome RunTraced(const TestCase& test_case, double horizon,
                       std::vector<TraceStep>* trace) const;
  bool ThreadSafe() const override { return true; }
  const KernelConfig& config() const { return config_; }

 private:
  KernelConfig config_;
};

}  // namespace scenefuzz

#endif  // SCENEFUZZ_CORE_SIM_KERNEL_H_
