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

#include "scenefuzz/sim_interface.h"

namespace scenefuzz {

using nlohmann::json;

std::string_view CompletionName(Completion c) {
  switch (c) {
    case Completion::kReachedGoal:
      return "reached_goal";
    case Completion::kTimedOut:
      return "timed_out";
    case Completion::kCollided:
      return "collided";
  }
  return "unknown";
}

namespace {

Completion CompletionFromName(const std::string& name) {
  for (Completion c : {Completion::kReachedGoal, Completion::kTimedOut,
                       Completion::kCollided}) {
    if (CompletionName(c) == name) return c;
  }
  throw ProtocolError("unknown completion '" + name + "'");
}

template <typename T>
T Get(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ProtocolError(std::string("outcome field '") + key + "' missing");
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ProtocolError(std::string("outcome field '") + key +
                        "' has the wrong type");
  }
}

}  // namespace

json CrashToJson(const CrashEvent& c) {
  return {{"time", c.time},
          {"partyA", c.party_a},
          {"partyB", c.party_b},
          {"contact",
           {{"easting", c.contact_point.easting},
            {"northing", c.contact_point.northing}}},
          {"relativeSpeedKmh", c.relative_speed_kmh}};
}

CrashEvent CrashFromJson(const json& j) {
  if (!j.is_object()) throw ProtocolError("crash must be an object");
  CrashEvent c;
  c.time = Get<double>(j, "time");
  c.party_a = Get<std::string>(j, "partyA");
  c.party_b = Get<std::string>(j, "partyB");
  const json contact = Get<json>(j, "contact");
  c.contact_point = {Get<double>(contact, "easting"),
                     Get<double>(contact, "northing")};
  c.relative_speed_kmh = Get<double>(j, "relativeSpeedKmh");
  return c;
}

json OutcomeToJson(const SimOutcome& o) {
  json traj = json::array();
  for (const TrajectorySample& s : o.trajectory.samples) {
    traj.push_back({s.time, s.easting, s.northing, s.heading, s.speed});
  }
  json crashes = json::array();
  for (const CrashEvent& c : o.crashes) crashes.push_back(CrashToJson(c));
  json verdicts = json::array();
  for (const LiabilityVerdict& v : o.verdicts) {
    verdicts.push_back({{"crash", v.crash_index},
                        {"egoAtFault", v.ego_at_fault},
                        {"rule", v.rule},
                        {"narrative", v.narrative}});
  }
  json violations = json::array();
  for (const RuleViolation& v : o.violations) {
    violations.push_back({{"kind", v.kind},
                          {"time", v.time},
                          {"agent", v.agent},
                          {"detail", v.detail}});
  }
  return {{"completed", CompletionName(o.completed)},
          {"minObstacleDistance", o.min_obstacle_distance},
          {"crashes", std::move(crashes)},
          {"verdicts", std::move(verdicts)},
          {"violations", std::move(violations)},
          {"trajectory", std::move(traj)}};
}

SimOutcome OutcomeFromJson(const json& j) {
  if (!j.is_object()) throw ProtocolError("outcome must be an object");
  SimOutcome o;
  o.completed = CompletionFromName(Get<std::string>(j, "completed"));
  o.min_obstacle_distance = Get<double>(j, "minObstacleDistance");
  for (const json& c : Get<json>(j, "crashes")) {
    o.crashes.push_back(CrashFromJson(c));
  }
  for (const json& v : Get<json>(j, "verdicts")) {
    o.verdicts.push_back({Get<size_t>(v, "crash"), Get<bool>(v, "egoAtFault"),
                          Get<std::string>(v, "rule"),
                          Get<std::string>(v, "narrative")});
  }
  for (const json& v : Get<json>(j, "violations")) {
    o.violations.push_back({Get<std::string>(v, "kind"), Get<double>(v, "time"),
                            Get<std::string>(v, "agent"),
                            Get<std::string>(v, "detail")});
  }
  for (const json& s : Get<json>(j, "trajectory")) {
    if (!s.is_array() || s.size() != 5) {
      throw ProtocolError("trajectory sample must be a 5-element array");
    }
    try {
      o.trajectory.samples.push_back({s[0].get<double>(), s[1].get<double>(),
                                      s[2].get<double>(), s[3].get<double>(),
                                      s[4].get<double>()});
    } catch (const json::exception&) {
      throw ProtocolError("trajectory sample must hold numbers");
    }
  }
  return o;
}

std::string SerializeOutcome(const SimOutcome& outcome) {
  return OutcomeToJson(outcome).dump() + "\n";
}

}  // namespace scenefuzz
