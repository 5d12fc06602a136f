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

#include "scenefuzz/scenario.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace scenefuzz {

using nlohmann::json;

std::string_view AgentKindName(AgentKind kind) {
  switch (kind) {
    case AgentKind::kSedan:
      return "sedan";
    case AgentKind::kSuv:
      return "suv";
    case AgentKind::kTruck:
      return "truck";
    case AgentKind::kPedestrian:
      return "pedestrian";
    case AgentKind::kTrafficCone:
      return "traffic_cone";
  }
  return "unknown";
}

std::optional<AgentKind> AgentKindFromName(std::string_view name) {
  for (AgentKind k : kAllAgentKinds) {
    if (AgentKindName(k) == name) return k;
  }
  return std::nullopt;
}

bool IsVehicle(AgentKind kind) {
  return kind == AgentKind::kSedan || kind == AgentKind::kSuv ||
         kind == AgentKind::kTruck;
}

Dimensions AgentDimensions(AgentKind kind) {
  switch (kind) {
    case AgentKind::kSedan:
      return {4.6, 1.8};
    case AgentKind::kSuv:
      return {4.9, 2.0};
    case AgentKind::kTruck:
      return {8.0, 2.5};
    case AgentKind::kPedestrian:
      return {0.6, 0.6};
    case AgentKind::kTrafficCone:
      return {0.5, 0.5};
  }
  return {1.0, 1.0};
}

std::string_view LightColorName(LightColor color) {
  switch (color) {
    case LightColor::kRed:
      return "red";
    case LightColor::kYellow:
      return "yellow";
    case LightColor::kGreen:
      return "green";
  }
  return "unknown";
}

std::optional<LightColor> LightColorFromName(std::string_view name) {
  for (LightColor c : {LightColor::kRed, LightColor::kYellow,
                       LightColor::kGreen}) {
    if (LightColorName(c) == name) return c;
  }
  return std::nullopt;
}

bool ValidationReport::HasRule(std::string_view rule) const {
  for (const Violation& v : violations) {
    if (v.rule == rule) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

class Validator {
 public:
  explicit Validator(ValidationReport& report) : report_(report) {}

  void Add(std::string path, std::string rule, std::string message) {
    report_.violations.push_back(
        {std::move(path), std::move(rule), std::move(message)});
  }

  bool Finite(const std::string& path, double v) {
    if (std::isfinite(v)) return true;
    Add(path, "finite", "value must be finite");
    return false;
  }

  void Identifier(const std::string& path, const std::string& id) {
    if (id.empty()) Add(path, "identifier-nonempty", "identifier is empty");
  }

 private:
  ValidationReport& report_;
};

double Distance(double e0, double n0, double e1, double n1) {
  return std::hypot(e1 - e0, n1 - n0);
}

}  // namespace

ValidationReport Validate(const TestCase& tc) {
  ValidationReport report;
  Validator v(report);
  v.Identifier("caseId", tc.case_id);

  const StaticConfig& st = tc.static_config;
  const DrivingArea& area = st.driving_area;
  v.Identifier("static.map", st.map_name);
  v.Identifier("static.egoModel", st.ego_model);
  bool area_ok = v.Finite("static.drivingArea.minEasting", area.min_easting);
  area_ok &= v.Finite("static.drivingArea.minNorthing", area.min_northing);
  area_ok &= v.Finite("static.drivingArea.maxEasting", area.max_easting);
  area_ok &= v.Finite("static.drivingArea.maxNorthing", area.max_northing);
  if (area_ok &&
      !(area.max_easting > area.min_easting &&
        area.max_northing > area.min_northing)) {
    v.Add("static.drivingArea", "driving-area-nondegenerate",
          "max corner must exceed min corner on both axes");
    area_ok = false;
  }

  bool start_ok = v.Finite("static.start.easting", st.start_pose.easting);
  start_ok &= v.Finite("static.start.northing", st.start_pose.northing);
  start_ok &= v.Finite("static.start.heading", st.start_pose.heading);
  bool end_ok = v.Finite("static.end.easting", st.end_point.easting);
  end_ok &= v.Finite("static.end.northing", st.end_point.northing);
  if (area_ok && start_ok &&
      !area.Contains(st.start_pose.easting, st.start_pose.northing)) {
    v.Add("static.start", "start-inside-area",
          "ego start lies outside the driving area");
  }
  if (area_ok && end_ok &&
      !area.Contains(st.end_point.easting, st.end_point.northing)) {
    v.Add("static.end", "end-inside-area",
          "end point lies outside the driving area");
  }
  if (start_ok && end_ok && st.start_pose.easting == st.end_point.easting &&
      st.start_pose.northing == st.end_point.northing) {
    v.Add("static.end", "start-differs-from-end",
          "start and end point coincide");
  }

  const DynamicConfig& dyn = tc.dynamic_config;
  std::set<std::string> agent_ids;
  for (size_t i = 0; i < dyn.npcs.size(); ++i) {
    const NpcAgent& npc = dyn.npcs[i];
    const std::string base = "dynamic.npcs[" + std::to_string(i) + "]";
    v.Identifier(base + ".id", npc.agent_id);
    if (!npc.agent_id.empty() && !agent_ids.insert(npc.agent_id).second) {
      v.Add(base + ".id", "unique-agent-ids",
            "duplicate agent id '" + npc.agent_id + "'");
    }
    bool pose_ok = v.Finite(base + ".spawn.easting", npc.spawn_pose.easting);
    pose_ok &= v.Finite(base + ".spawn.northing", npc.spawn_pose.northing);
    pose_ok &= v.Finite(base + ".spawn.heading", npc.spawn_pose.heading);
    if (pose_ok && area_ok &&
        !area.Contains(npc.spawn_pose.easting, npc.spawn_pose.northing)) {
      v.Add(base + ".spawn", "spawn-inside-area",
            "spawn pose lies outside the driving area");
    }
    const auto check_speed = [&](const std::string& path, double speed) {
      if (v.Finite(path, speed) && (speed < 0.0 || speed > kMaxAgentSpeed)) {
        v.Add(path, "speed-range", "speed must lie in [0, 30] m/s");
      }
    };
    if (const auto* lf = std::get_if<LaneFollow>(&npc.behavior)) {
      check_speed(base + ".behavior.speed", lf->speed);
    } else if (const auto* wp = std::get_if<WaypointPath>(&npc.behavior)) {
      if (wp->waypoints.empty()) {
        v.Add(base + ".behavior.waypoints", "waypoints-nonempty",
              "waypoint list is empty");
      }
      for (size_t j = 0; j < wp->waypoints.size(); ++j) {
        const std::string wpath =
            base + ".behavior.waypoints[" + std::to_string(j) + "]";
        v.Finite(wpath + ".easting", wp->waypoints[j].easting);
        v.Finite(wpath + ".northing", wp->waypoints[j].northing);
        check_speed(wpath + ".speed", wp->waypoints[j].speed);
      }
    }
    if (pose_ok && start_ok &&
        Distance(npc.spawn_pose.easting, npc.spawn_pose.northing,
                 st.start_pose.easting, st.start_pose.northing) <
            kSpawnSeparation) {
      v.Add(base + ".spawn", "non-overlapping-spawn",
            "agent spawns within 3 m of the ego start");
    }
    for (size_t j = 0; j < i; ++j) {
      const GeoPose& other = dyn.npcs[j].spawn_pose;
      if (pose_ok && Distance(npc.spawn_pose.easting, npc.spawn_pose.northing,
                              other.easting, other.northing) <
                         kSpawnSeparation) {
        v.Add(base + ".spawn", "non-overlapping-spawn",
              "agent spawns within 3 m of dynamic.npcs[" + std::to_string(j) +
                  "]");
      }
    }
  }

  std::set<std::string> light_ids;
  for (size_t i = 0; i < dyn.traffic_lights.size(); ++i) {
    const TrafficLightPlan& plan = dyn.traffic_lights[i];
    const std::string base = "dynamic.trafficLights[" + std::to_string(i) + "]";
    v.Identifier(base + ".id", plan.light_id);
    if (!plan.light_id.empty() && !light_ids.insert(plan.light_id).second) {
      v.Add(base + ".id", "unique-light-ids",
            "duplicate light id '" + plan.light_id + "'");
    }
    if (plan.schedule.empty()) {
      v.Add(base + ".schedule", "schedule-nonempty", "schedule is empty");
    }
    for (size_t j = 0; j < plan.schedule.size(); ++j) {
      const std::string ppath =
          base + ".schedule[" + std::to_string(j) + "].duration";
      const double d = plan.schedule[j].duration;
      if (v.Finite(ppath, d) && !(d > 0.0)) {
        v.Add(ppath, "duration-positive", "phase duration must be positive");
      }
    }
  }

  const Environment& env = dyn.environment;
  const std::pair<const char*, double> env_fields[] = {
      {"lightIntensity", env.light_intensity},
      {"rain", env.rain},
      {"fog", env.fog},
      {"wetness", env.wetness}};
  for (const auto& [name, value] : env_fields) {
    const std::string path = std::string("dynamic.environment.") + name;
    if (v.Finite(path, value) && (value < 0.0 || value > 1.0)) {
      v.Add(path, "environment-range", "value must lie in [0, 1]");
    }
  }

  const Lineage& lin = tc.lineage;
  if (lin.generation < 0) {
    v.Add("lineage.generation", "lineage-consistency",
          "generation must be non-negative");
  } else if ((lin.generation == 0) != !lin.parent_id.has_value()) {
    v.Add("lineage", "lineage-consistency",
          "generation is 0 exactly when there is no parent");
  }
  return report;
}

// ---------------------------------------------------------------------------
// JSON reading

namespace {

std::string Join(const std::string& base, std::string_view key) {
  return base.empty() ? std::string(key) : base + "." + std::string(key);
}

[[noreturn]] void Schema(const std::string& path, const std::string& what) {
  throw SchemaViolation(path + ": " + what, path);
}

const json& RequireObject(const json& j, const std::string& path) {
  if (!j.is_object()) Schema(path, "expected an object");
  return j;
}

const json& Field(const json& obj, std::string_view key,
                  const std::string& base) {
  auto it = obj.find(key);
  if (it == obj.end()) Schema(Join(base, key), "missing required field");
  return *it;
}

double Number(const json& obj, std::string_view key, const std::string& base) {
  const json& v = Field(obj, key, base);
  if (!v.is_number()) Schema(Join(base, key), "expected a number");
  return v.get<double>();
}

std::string String(const json& obj, std::string_view key,
                   const std::string& base) {
  const json& v = Field(obj, key, base);
  if (!v.is_string()) Schema(Join(base, key), "expected a string");
  return v.get<std::string>();
}

const json& Array(const json& obj, std::string_view key,
                  const std::string& base) {
  const json& v = Field(obj, key, base);
  if (!v.is_array()) Schema(Join(base, key), "expected an array");
  return v;
}

// Value objects are closed: an unexpected key is a schema error.
void Closed(const json& obj, std::initializer_list<std::string_view> keys,
            const std::string& base) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (std::string_view k : keys) known |= (it.key() == k);
    if (!known) Schema(Join(base, it.key()), "unexpected field");
  }
}

// Entity objects keep unknown keys for round-tripping.
json Extras(const json& obj, std::initializer_list<std::string_view> keys) {
  json extras = json::object();
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (std::string_view k : keys) known |= (it.key() == k);
    if (!known) extras[it.key()] = it.value();
  }
  return extras;
}

GeoPose ReadPose(const json& j, const std::string& path) {
  RequireObject(j, path);
  Closed(j, {"easting", "northing", "heading"}, path);
  return {Number(j, "easting", path), Number(j, "northing", path),
          Number(j, "heading", path)};
}

GeoPoint ReadPoint(const json& j, const std::string& path) {
  RequireObject(j, path);
  Closed(j, {"easting", "northing"}, path);
  return {Number(j, "easting", path), Number(j, "northing", path)};
}

DrivingArea ReadArea(const json& j, const std::string& path) {
  RequireObject(j, path);
  Closed(j, {"minEasting", "minNorthing", "maxEasting", "maxNorthing"}, path);
  return {Number(j, "minEasting", path), Number(j, "minNorthing", path),
          Number(j, "maxEasting", path), Number(j, "maxNorthing", path)};
}

StaticConfig ReadStatic(const json& j, const std::string& path) {
  RequireObject(j, path);
  StaticConfig st;
  st.map_name = String(j, "map", path);
  st.driving_area = ReadArea(Field(j, "drivingArea", path),
                             Join(path, "drivingArea"));
  st.ego_model = String(j, "egoModel", path);
  st.start_pose = ReadPose(Field(j, "start", path), Join(path, "start"));
  st.end_point = ReadPoint(Field(j, "end", path), Join(path, "end"));
  st.extras = Extras(j, {"map", "drivingArea", "egoModel", "start", "end"});
  return st;
}

Behavior ReadBehavior(const json& j, const std::string& path) {
  RequireObject(j, path);
  const std::string type = String(j, "type", path);
  if (type == "stationary") {
    Closed(j, {"type"}, path);
    return Stationary{};
  }
  if (type == "laneFollow") {
    Closed(j, {"type", "speed"}, path);
    return LaneFollow{Number(j, "speed", path)};
  }
  if (type == "waypoints") {
    Closed(j, {"type", "waypoints"}, path);
    WaypointPath wp;
    const json& arr = Array(j, "waypoints", path);
    for (size_t i = 0; i < arr.size(); ++i) {
      const std::string wpath =
          Join(path, "waypoints[" + std::to_string(i) + "]");
      RequireObject(arr[i], wpath);
      Closed(arr[i], {"easting", "northing", "speed"}, wpath);
      wp.waypoints.push_back({Number(arr[i], "easting", wpath),
                              Number(arr[i], "northing", wpath),
                              Number(arr[i], "speed", wpath)});
    }
    return wp;
  }
  Schema(Join(path, "type"), "unknown behavior type '" + type + "'");
}

NpcAgent ReadNpc(const json& j, const std::string& path) {
  RequireObject(j, path);
  NpcAgent npc;
  npc.agent_id = String(j, "id", path);
  const std::string kind = String(j, "kind", path);
  const auto parsed_kind = AgentKindFromName(kind);
  if (!parsed_kind) Schema(Join(path, "kind"), "unknown kind '" + kind + "'");
  npc.kind = *parsed_kind;
  npc.spawn_pose = ReadPose(Field(j, "spawn", path), Join(path, "spawn"));
  npc.behavior = ReadBehavior(Field(j, "behavior", path),
                              Join(path, "behavior"));
  npc.extras = Extras(j, {"id", "kind", "spawn", "behavior"});
  return npc;
}

TrafficLightPlan ReadLight(const json& j, const std::string& path) {
  RequireObject(j, path);
  TrafficLightPlan plan;
  plan.light_id = String(j, "id", path);
  const json& arr = Array(j, "schedule", path);
  for (size_t i = 0; i < arr.size(); ++i) {
    const std::string ppath = Join(path, "schedule[" + std::to_string(i) + "]");
    RequireObject(arr[i], ppath);
    Closed(arr[i], {"color", "duration"}, ppath);
    const std::string color = String(arr[i], "color", ppath);
    const auto parsed = LightColorFromName(color);
    if (!parsed) {
      Schema(Join(ppath, "color"), "unknown color '" + color + "'");
    }
    plan.schedule.push_back({*parsed, Number(arr[i], "duration", ppath)});
  }
  plan.extras = Extras(j, {"id", "schedule"});
  return plan;
}

Environment ReadEnvironment(const json& j, const std::string& path) {
  RequireObject(j, path);
  Environment env;
  const auto opt = [&](std::string_view key, double& out) {
    if (j.contains(key)) out = Number(j, key, path);
  };
  opt("lightIntensity", env.light_intensity);
  opt("rain", env.rain);
  opt("fog", env.fog);
  opt("wetness", env.wetness);
  env.extras = Extras(j, {"lightIntensity", "rain", "fog", "wetness"});
  return env;
}

DynamicConfig ReadDynamic(const json& j, const std::string& path) {
  RequireObject(j, path);
  DynamicConfig dyn;
  const json& npcs = Array(j, "npcs", path);
  for (size_t i = 0; i < npcs.size(); ++i) {
    dyn.npcs.push_back(
        ReadNpc(npcs[i], Join(path, "npcs[" + std::to_string(i) + "]")));
  }
  const json& lights = Array(j, "trafficLights", path);
  for (size_t i = 0; i < lights.size(); ++i) {
    dyn.traffic_lights.push_back(ReadLight(
        lights[i], Join(path, "trafficLights[" + std::to_string(i) + "]")));
  }
  if (j.contains("environment")) {
    dyn.environment =
        ReadEnvironment(j["environment"], Join(path, "environment"));
  }
  dyn.extras = Extras(j, {"npcs", "trafficLights", "environment"});
  return dyn;
}

Lineage ReadLineage(const json& j, const std::string& path) {
  RequireObject(j, path);
  Closed(j, {"parentId", "strategy", "generation"}, path);
  Lineage lin;
  const auto opt_string = [&](std::string_view key) -> std::optional<std::string> {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) Schema(Join(path, key), "expected a string or null");
    return it->get<std::string>();
  };
  lin.parent_id = opt_string("parentId");
  lin.strategy = opt_string("strategy");
  if (j.contains("generation")) {
    const json& g = j["generation"];
    if (!g.is_number_integer()) {
      Schema(Join(path, "generation"), "expected an integer");
    }
    const int64_t gen = g.get<int64_t>();
    if (gen < 0 || gen > std::numeric_limits<int>::max()) {
      Schema(Join(path, "generation"), "generation out of range");
    }
    lin.generation = static_cast<int>(gen);
  }
  return lin;
}

}  // namespace

TestCase TestCaseFromJson(const json& doc) {
  RequireObject(doc, "");
  TestCase tc;
  tc.case_id = String(doc, "caseId", "");
  tc.static_config = ReadStatic(Field(doc, "static", ""), "static");
  tc.dynamic_config = ReadDynamic(Field(doc, "dynamic", ""), "dynamic");
  if (auto it = doc.find("rngSeed"); it != doc.end()) {
    if (!it->is_number_unsigned()) {
      Schema("rngSeed", "expected a non-negative integer");
    }
    tc.rng_seed = it->get<uint64_t>();
  }
  if (auto it = doc.find("lineage"); it != doc.end()) {
    tc.lineage = ReadLineage(*it, "lineage");
  }
  tc.extras = Extras(doc, {"caseId", "static", "dynamic", "rngSeed",
                           "lineage"});

  const ValidationReport report = Validate(tc);
  if (!report.ok()) {
    std::string msg;
    for (const Violation& v : report.violations) {
      if (!msg.empty()) msg += "; ";
      msg += v.path + ": " + v.rule + " (" + v.message + ")";
    }
    throw SemanticViolation(msg, report.violations.front().path);
  }
  return tc;
}

TestCase ParseTestCase(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::exception& e) {
    throw MalformedJson(std::string("malformed JSON: ") + e.what(), "");
  }
  return TestCaseFromJson(doc);
}

// ---------------------------------------------------------------------------
// JSON writing

namespace {

json PoseJson(const GeoPose& p) {
  return {{"easting", p.easting}, {"northing", p.northing},
          {"heading", p.heading}};
}

json BehaviorJson(const Behavior& b) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Stationary>) {
          return {{"type", "stationary"}};
        } else if constexpr (std::is_same_v<T, LaneFollow>) {
          return {{"type", "laneFollow"}, {"speed", v.speed}};
        } else {
          json arr = json::array();
          for (const Waypoint& w : v.waypoints) {
            arr.push_back({{"easting", w.easting},
                           {"northing", w.northing},
                           {"speed", w.speed}});
          }
          return {{"type", "waypoints"}, {"waypoints", std::move(arr)}};
        }
      },
      b);
}

json WithExtras(const json& extras, json known) {
  json out = extras.is_object() ? extras : json::object();
  for (auto it = known.begin(); it != known.end(); ++it) {
    out[it.key()] = it.value();
  }
  return out;
}

}  // namespace

json TestCaseToJson(const TestCase& tc) {
  const StaticConfig& st = tc.static_config;
  const DrivingArea& a = st.driving_area;
  json static_json = WithExtras(
      st.extras,
      {{"map", st.map_name},
       {"drivingArea",
        {{"minEasting", a.min_easting},
         {"minNorthing", a.min_northing},
         {"maxEasting", a.max_easting},
         {"maxNorthing", a.max_northing}}},
       {"egoModel", st.ego_model},
       {"start", PoseJson(st.start_pose)},
       {"end",
        {{"easting", st.end_point.easting},
         {"northing", st.end_point.northing}}}});

  const DynamicConfig& dyn = tc.dynamic_config;
  json npcs = json::array();
  for (const NpcAgent& npc : dyn.npcs) {
    npcs.push_back(WithExtras(npc.extras,
                              {{"id", npc.agent_id},
                               {"kind", AgentKindName(npc.kind)},
                               {"spawn", PoseJson(npc.spawn_pose)},
                               {"behavior", BehaviorJson(npc.behavior)}}));
  }
  json lights = json::array();
  for (const TrafficLightPlan& plan : dyn.traffic_lights) {
    json schedule = json::array();
    for (const LightPhase& p : plan.schedule) {
      schedule.push_back(
          {{"color", LightColorName(p.color)}, {"duration", p.duration}});
    }
    lights.push_back(WithExtras(
        plan.extras, {{"id", plan.light_id}, {"schedule", schedule}}));
  }
  const Environment& env = dyn.environment;
  json env_json = WithExtras(env.extras, {{"lightIntensity", env.light_intensity},
                                          {"rain", env.rain},
                                          {"fog", env.fog},
                                          {"wetness", env.wetness}});
  json dynamic_json =
      WithExtras(dyn.extras, {{"npcs", std::move(npcs)},
                              {"trafficLights", std::move(lights)},
                              {"environment", std::move(env_json)}});

  json lineage = {{"generation", tc.lineage.generation}};
  if (tc.lineage.parent_id) lineage["parentId"] = *tc.lineage.parent_id;
  if (tc.lineage.strategy) lineage["strategy"] = *tc.lineage.strategy;

  return WithExtras(tc.extras, {{"caseId", tc.case_id},
                                {"rngSeed", tc.rng_seed},
                                {"lineage", std::move(lineage)},
                                {"static", std::move(static_json)},
                                {"dynamic", std::move(dynamic_json)}});
}

std::string SerializeTestCase(const TestCase& tc) {
  return TestCaseToJson(tc).dump(2) + "\n";
}

TestCase LoadTestCase(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseTestCase(buf.str());
}

void SaveTestCase(const TestCase& tc, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << SerializeTestCase(tc);
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace scenefuzz
