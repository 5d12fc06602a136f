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

#ifndef SCENEFUZZ_CORE_SCENARIO_H_
#define SCENEFUZZ_CORE_SCENARIO_H_

// Formalized driving test case: a static scene skeleton plus the dynamic
// configuration the fuzzer mutates. The `.scene.json` wire format is
// documented in docs/scene_format.md.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "scenefuzz/geometry.h"

namespace scenefuzz {

// UTM easting/northing are treated as a flat Cartesian plane in meters.
struct DrivingArea {
  double min_easting = 0.0;
  double min_northing = 0.0;
  double max_easting = 0.0;
  double max_northing = 0.0;

  double Width() const { return max_easting - min_easting; }
  double Height() const { return max_northing - min_northing; }
  Vec2 Center() const {
    return {(min_easting + max_easting) / 2.0,
            (min_northing + max_northing) / 2.0};
  }
  bool Contains(double easting, double northing) const {
    return easting >= min_easting && easting <= max_easting &&
           northing >= min_northing && northing <= max_northing;
  }
  friend bool operator==(const DrivingArea&, const DrivingArea&) = default;
};

struct GeoPoint {
  double easting = 0.0;
  double northing = 0.0;
  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct GeoPose {
  double easting = 0.0;
  double northing = 0.0;
  double heading = 0.0;  // radians, counter-clockwise from east
  friend bool operator==(const GeoPose&, const GeoPose&) = default;
};

struct StaticConfig {
  std::string map_name;
  DrivingArea driving_area;
  std::string ego_model;
  GeoPose start_pose;
  GeoPoint end_point;
  nlohmann::json extras = nlohmann::json::object();
  friend bool operator==(const StaticConfig&, const StaticConfig&) = default;
};

enum class AgentKind { kSedan, kSuv, kTruck, kPedestrian, kTrafficCone };

inline constexpr AgentKind kAllAgentKinds[] = {
    AgentKind::kSedan, AgentKind::kSuv, AgentKind::kTruck,
    AgentKind::kPedestrian, AgentKind::kTrafficCone};

std::string_view AgentKindName(AgentKind kind);
std::optional<AgentKind> AgentKindFromName(std::string_view name);
bool IsVehicle(AgentKind kind);

// Nominal footprint (length, width) in meters.
struct Dimensions {
  double length;
  double width;
};
Dimensions AgentDimensions(AgentKind kind);
inline constexpr Dimensions kEgoDimensions{4.7, 1.9};

struct Stationary {
  friend bool operator==(const Stationary&, const Stationary&) = default;
};
struct LaneFollow {
  double speed = 0.0;  // m/s
  friend bool operator==(const LaneFollow&, const LaneFollow&) = default;
};
struct Waypoint {
  double easting = 0.0;
  double northing = 0.0;
  double speed = 0.0;  // m/s while heading towards this waypoint
  friend bool operator==(const Waypoint&, const Waypoint&) = default;
};
struct WaypointPath {
  std::vector<Waypoint> waypoints;
  friend bool operator==(const WaypointPath&, const WaypointPath&) = default;
};
using Behavior = std::variant<Stationary, LaneFollow, WaypointPath>;

struct NpcAgent {
  std::string agent_id;
  AgentKind kind = AgentKind::kSedan;
  GeoPose spawn_pose;
  Behavior behavior = Stationary{};
  nlohmann::json extras = nlohmann::json::object();
  friend bool operator==(const NpcAgent&, const NpcAgent&) = default;
};

enum class LightColor { kRed, kYellow, kGreen };
std::string_view LightColorName(LightColor color);
std::optional<LightColor> LightColorFromName(std::string_view name);

struct LightPhase {
  LightColor color = LightColor::kGreen;
  double duration = 0.0;  // seconds
  friend bool operator==(const LightPhase&, const LightPhase&) = default;
};

// Schedule is interpreted cyclically from t = 0.
struct TrafficLightPlan {
  std::string light_id;
  std::vector<LightPhase> schedule;
  nlohmann::json extras = nlohmann::json::object();
  friend bool operator==(const TrafficLightPlan&,
                         const TrafficLightPlan&) = default;
};

struct Environment {
  double light_intensity = 0.0;
  double rain = 0.0;
  double fog = 0.0;
  double wetness = 0.0;
  nlohmann::json extras = nlohmann::json::object();
  friend bool operator==(const Environment&, const Environment&) = default;
};

struct DynamicConfig {
  std::vector<NpcAgent> npcs;
  std::vector<TrafficLightPlan> traffic_lights;
  Environment environment;
  nlohmann::json extras = nlohmann::json::object();
  friend bool operator==(const DynamicConfig&, const DynamicConfig&) = default;
};

struct Lineage {
  std::optional<std::string> parent_id;
  std::optional<std::string> strategy;
  int generation = 0;
  friend bool operator==(const Lineage&, const Lineage&) = default;
};

struct TestCase {
  std::string case_id;
  StaticConfig static_config;
  DynamicConfig dynamic_config;
  uint64_t rng_seed = 0;
  Lineage lineage;
  nlohmann::json extras = nlohmann::json::object();
  friend bool operator==(const TestCase&, const TestCase&) = default;
};

// Errors raised by ParseTestCase. `path()` names the offending field as a
// JSON-pointer-like path, e.g. "dynamic.npcs[2].spawn.easting".
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& what, std::string path)
      : std::runtime_error(what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};
class MalformedJson : public ScenarioError {
  using ScenarioError::ScenarioError;
};
class SchemaViolation : public ScenarioError {
  using ScenarioError::ScenarioError;
};
class SemanticViolation : public ScenarioError {
  using ScenarioError::ScenarioError;
};

struct Violation {
  std::string path;
  std::string rule;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool HasRule(std::string_view rule) const;
};

// Minimum centre distance between spawned agents, and between any agent and
// the ego start.
inline constexpr double kSpawnSeparation = 3.0;
inline constexpr double kMaxAgentSpeed = 30.0;

ValidationReport Validate(const TestCase& test_case);

TestCase ParseTestCase(std::string_view document);
TestCase TestCaseFromJson(const nlohmann::json& doc);
nlohmann::json TestCaseToJson(const TestCase& test_case);

// Canonical text: sorted keys, two-space indent, trailing newline. Doubles
// are printed with the shortest representation that round-trips exactly.
std::string SerializeTestCase(const TestCase& test_case);

TestCase LoadTestCase(const std::string& path);
void SaveTestCase(const TestCase& test_case, const std::string& path);

}  // namespace scenefuzz

#endif  // SCENEFUZZ_CORE_SCENARIO_H_
