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

#include "scenefuzz/mutation.h"

#include <cmath>
#include <numbers>

#include "scenefuzz/geometry.h"

namespace scenefuzz {

std::string_view StrategyName(MutationStrategy strategy) {
  switch (strategy) {
    case MutationStrategy::kArithmetic:
      return "arithmetic";
    case MutationStrategy::kFlip:
      return "flip";
    case MutationStrategy::kRandom:
      return "random";
    case MutationStrategy::kInsert:
      return "insert";
  }
  return "unknown";
}

std::optional<MutationStrategy> StrategyFromName(std::string_view name) {
  for (MutationStrategy s : kAllStrategies) {
    if (StrategyName(s) == name) return s;
  }
  return std::nullopt;
}

void MutationConfig::Check() const {
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (max_npcs < 1) throw std::invalid_argument("max_npcs must be >= 1");
  double total = 0.0;
  for (double w : strategy_weights) {
    if (!(w >= 0.0)) {
      throw std::invalid_argument("strategy weights must be non-negative");
    }
    total += w;
  }
  if (!(total > 0.0)) {
    throw std::invalid_argument("strategy weights must not all be zero");
  }
  if (!(random_speed_max >= random_speed_min) || random_speed_min < 0.0 ||
      random_speed_max > kMaxAgentSpeed) {
    throw std::invalid_argument("random speed range must lie in [0, 30]");
  }
  if (insert_kinds.empty()) {
    throw std::invalid_argument("insert_kinds must not be empty");
  }
  if (!(arithmetic_step > 0.0) || !(speed_step > 0.0) ||
      !(environment_step > 0.0)) {
    throw std::invalid_argument("arithmetic steps must be positive");
  }
}

LightColor NextFlipColor(LightColor color) {
  switch (color) {
    case LightColor::kRed:
      return LightColor::kGreen;
    case LightColor::kGreen:
      return LightColor::kYellow;
    case LightColor::kYellow:
      return LightColor::kRed;
  }
  return LightColor::kRed;
}

namespace {

double& EnvRef(Environment& env, size_t field) {
  switch (static_cast<EnvironmentField>(field)) {
    case EnvironmentField::kLightIntensity:
      return env.light_intensity;
    case EnvironmentField::kRain:
      return env.rain;
    case EnvironmentField::kFog:
      return env.fog;
    case EnvironmentField::kWetness:
      return env.wetness;
  }
  throw std::invalid_argument("bad environment field");
}

NpcAgent& NpcRef(TestCase& tc, const MutationTarget& t) {
  if (t.index >= tc.dynamic_config.npcs.size()) {
    throw std::invalid_argument("mutation target names a missing agent");
  }
  return tc.dynamic_config.npcs[t.index];
}

double& SpeedRef(NpcAgent& npc, size_t sub) {
  if (auto* lf = std::get_if<LaneFollow>(&npc.behavior)) {
    if (sub == MutationTarget::kLaneSpeed) return lf->speed;
  } else if (auto* wp = std::get_if<WaypointPath>(&npc.behavior)) {
    if (sub < wp->waypoints.size()) return wp->waypoints[sub].speed;
  }
  throw std::invalid_argument("mutation target names a missing speed");
}

LightPhase& PhaseRef(TestCase& tc, const MutationTarget& t) {
  auto& lights = tc.dynamic_config.traffic_lights;
  if (t.index >= lights.size() || t.sub >= lights[t.index].schedule.size()) {
    throw std::invalid_argument("mutation target names a missing light phase");
  }
  return lights[t.index].schedule[t.sub];
}

void AppendSpeedTargets(const NpcAgent& npc, size_t i,
                        std::vector<MutationTarget>& out) {
  using K = MutationTarget::Kind;
  if (std::holds_alternative<LaneFollow>(npc.behavior)) {
    out.push_back({K::kNpcSpeed, i, MutationTarget::kLaneSpeed});
  } else if (const auto* wp = std::get_if<WaypointPath>(&npc.behavior)) {
    for (size_t j = 0; j < wp->waypoints.size(); ++j) {
      out.push_back({K::kNpcSpeed, i, j});
    }
  }
}

void AppendEnvTargets(std::vector<MutationTarget>& out) {
  for (size_t f = 0; f < 4; ++f) {
    out.push_back({MutationTarget::Kind::kEnvironment, 0, f});
  }
}

void AppendLightTargets(const TestCase& tc, std::vector<MutationTarget>& out) {
  const auto& lights = tc.dynamic_config.traffic_lights;
  for (size_t i = 0; i < lights.size(); ++i) {
    for (size_t j = 0; j < lights[i].schedule.size(); ++j) {
      out.push_back({MutationTarget::Kind::kLightColor, i, j});
    }
  }
}

}  // namespace

std::vector<MutationTarget> ApplicableTargets(const TestCase& tc,
                                              MutationStrategy strategy,
                                              const MutationConfig& config) {
  using K = MutationTarget::Kind;
  std::vector<MutationTarget> out;
  const auto& npcs = tc.dynamic_config.npcs;
  switch (strategy) {
    case MutationStrategy::kArithmetic:
      for (size_t i = 0; i < npcs.size(); ++i) {
        out.push_back({K::kNpcEasting, i, 0});
        out.push_back({K::kNpcNorthing, i, 0});
        AppendSpeedTargets(npcs[i], i, out);
      }
      AppendEnvTargets(out);
      break;
    case MutationStrategy::kFlip:
      for (size_t i = 0; i < npcs.size(); ++i) {
        out.push_back({K::kNpcPosition, i, 0});
      }
      AppendLightTargets(tc, out);
      break;
    case MutationStrategy::kRandom:
      for (size_t i = 0; i < npcs.size(); ++i) {
        out.push_back({K::kNpcPosition, i, 0});
        AppendSpeedTargets(npcs[i], i, out);
      }
      AppendEnvTargets(out);
      AppendLightTargets(tc, out);
      break;
    case MutationStrategy::kInsert:
      // Insert has no field target; a single placeholder marks capacity.
      if (npcs.size() < config.max_npcs) out.push_back({K::kNpcPosition, 0, 0});
      break;
  }
  return out;
}

TestCase ArithmeticStep(const TestCase& tc, const MutationTarget& target,
                        int sign, const MutationConfig& config) {
  using K = MutationTarget::Kind;
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +-1");
  TestCase out = tc;
  const DrivingArea& area = tc.static_config.driving_area;
  switch (target.kind) {
    case K::kNpcEasting: {
      GeoPose& p = NpcRef(out, target).spawn_pose;
      p.easting += sign * config.arithmetic_step;
      if (!area.Contains(p.easting, p.northing)) {
        throw OutOfRange("easting leaves the driving area");
      }
      break;
    }
    case K::kNpcNorthing: {
      GeoPose& p = NpcRef(out, target).spawn_pose;
      p.northing += sign * config.arithmetic_step;
      if (!area.Contains(p.easting, p.northing)) {
        throw OutOfRange("northing leaves the driving area");
      }
      break;
    }
    case K::kNpcSpeed: {
      double& v = SpeedRef(NpcRef(out, target), target.sub);
      v += sign * config.speed_step;
      if (v < 0.0 || v > kMaxAgentSpeed) {
        throw OutOfRange("speed leaves [0, 30] m/s");
      }
      break;
    }
    case K::kEnvironment: {
      double& v = EnvRef(out.dynamic_config.environment, target.sub);
      v += sign * config.environment_step;
      if (v < 0.0 || v > 1.0) throw OutOfRange("environment leaves [0, 1]");
      break;
    }
    default:
      throw std::invalid_argument("arithmetic does not apply to this target");
  }
  return out;
}

TestCase Flip(const TestCase& tc, const MutationTarget& target,
              const MutationConfig& /*config*/) {
  using K = MutationTarget::Kind;
  TestCase out = tc;
  switch (target.kind) {
    case K::kLightColor: {
      LightPhase& phase = PhaseRef(out, target);
      phase.color = NextFlipColor(phase.color);
      return out;
    }
    case K::kNpcPosition: {
      const DrivingArea& a = tc.static_config.driving_area;
      GeoPose& p = NpcRef(out, target).spawn_pose;
      p.easting = (a.min_easting + a.max_easting) - p.easting;
      p.northing = (a.min_northing + a.max_northing) - p.northing;
      p.heading = NormalizeAngle(p.heading + std::numbers::pi);
      const ValidationReport report = Validate(out);
      if (!report.ok()) {
        throw OutOfRange("reflected position is invalid: " +
                         report.violations.front().rule);
      }
      return out;
    }
    default:
      throw std::invalid_argument("flip does not apply to this target");
  }
}

TestCase RandomReplace(const TestCase& tc, const MutationTarget& target,
                       const MutationConfig& config, Rng& rng) {
  using K = MutationTarget::Kind;
  TestCase out = tc;
  switch (target.kind) {
    case K::kNpcPosition: {
      const DrivingArea& range = config.random_position_range.value_or(
          tc.static_config.driving_area);
      GeoPose& p = NpcRef(out, target).spawn_pose;
      p.easting = rng.Uniform(range.min_easting, range.max_easting);
      p.northing = rng.Uniform(range.min_northing, range.max_northing);
      break;
    }
    case K::kNpcSpeed:
      SpeedRef(NpcRef(out, target), target.sub) =
          rng.Uniform(config.random_speed_min, config.random_speed_max);
      break;
    case K::kEnvironment:
      EnvRef(out.dynamic_config.environment, target.sub) = rng.Uniform01();
      break;
    case K::kLightColor: {
      static constexpr LightColor kColors[] = {
          LightColor::kRed, LightColor::kYellow, LightColor::kGreen};
      PhaseRef(out, target).color = kColors[rng.Below(3)];
      break;
    }
    default:
      throw std::invalid_argument("random does not apply to this target");
  }
  return out;
}

TestCase InsertAgent(const TestCase& tc, const MutationConfig& config,
                     Rng& rng) {
  if (tc.dynamic_config.npcs.size() >= config.max_npcs) {
    throw NoApplicableTarget("agent capacity reached");
  }
  const StaticConfig& st = tc.static_config;
  const Vec2 start{st.start_pose.easting, st.start_pose.northing};
  const Vec2 end{st.end_point.easting, st.end_point.northing};
  const double route_len = Norm(end - start);
  const Vec2 dir = route_len > 0.0 ? (1.0 / route_len) * (end - start)
                                   : UnitFromHeading(st.start_pose.heading);
  const Vec2 left = LeftNormal(dir);
  const double route_heading = std::atan2(dir.y, dir.x);
  const double half_corridor = config.insert_corridor_width / 2.0;

  NpcAgent agent;
  agent.kind = config.insert_kinds[rng.Below(config.insert_kinds.size())];
  do {
    agent.agent_id = HexId("ins-", rng.NextU64(), 8);
  } while ([&] {
    for (const NpcAgent& n : tc.dynamic_config.npcs) {
      if (n.agent_id == agent.agent_id) return true;
    }
    return false;
  }());

  for (int attempt = 0; attempt < config.insert_attempts; ++attempt) {
    const double along = rng.Uniform(0.0, route_len);
    const double lateral = rng.Uniform(-half_corridor, half_corridor);
    const Vec2 pos = start + along * dir + lateral * left;
    agent.spawn_pose = {pos.x, pos.y, route_heading};
    if (agent.kind == AgentKind::kPedestrian) {
      // Pedestrians cross the route to the far side of the corridor.
      const double far = (lateral >= 0.0 ? -1.0 : 1.0) * (half_corridor + 2.0);
      const Vec2 goal = start + along * dir + far * left;
      agent.spawn_pose.heading = std::atan2(goal.y - pos.y, goal.x - pos.x);
      agent.behavior =
          WaypointPath{{{goal.x, goal.y, rng.Uniform(0.8, 2.0)}}};
    } else {
      agent.behavior = Stationary{};
    }
    TestCase out = tc;
    out.dynamic_config.npcs.push_back(agent);
    if (Validate(out).ok()) return out;
  }
  throw PlacementFailed("no valid placement along the route");
}

MutationBatch Mutate(const TestCase& parent, const MutationConfig& config,
                     Rng& rng) {
  config.Check();
  std::array<std::vector<MutationTarget>, 4> targets;
  std::array<double, 4> weights{};
  bool any = false;
  for (MutationStrategy s : kAllStrategies) {
    const size_t i = static_cast<size_t>(s);
    targets[i] = ApplicableTargets(parent, s, config);
    if (!targets[i].empty()) {
      weights[i] = config.Weight(s);
      any = true;
    }
  }
  if (!any) throw NoApplicableTarget("no strategy has an applicable target");
  double applicable_weight = 0.0;
  for (double w : weights) applicable_weight += w;
  if (!(applicable_weight > 0.0)) {
    // Every weighted strategy is inapplicable: fall back to the rest.
    for (size_t i = 0; i < 4; ++i) weights[i] = targets[i].empty() ? 0.0 : 1.0;
  }

  MutationBatch batch;
  batch.parent_id = parent.case_id;
  for (size_t n = 0; n < config.batch_size; ++n) {
    ++batch.candidates;
    const auto strategy = static_cast<MutationStrategy>(rng.Weighted(weights));
    const auto& pool = targets[static_cast<size_t>(strategy)];
    const std::string case_id = HexId("m-", rng.NextU64(), 12);
    std::optional<TestCase> child;
    try {
      switch (strategy) {
        case MutationStrategy::kArithmetic: {
          const MutationTarget& t = pool[rng.Below(pool.size())];
          const int sign = rng.Bernoulli(0.5) ? 1 : -1;
          child = ArithmeticStep(parent, t, sign, config);
          break;
        }
        case MutationStrategy::kFlip:
          child = Flip(parent, pool[rng.Below(pool.size())], config);
          break;
        case MutationStrategy::kRandom: {
          const MutationTarget& t = pool[rng.Below(pool.size())];
          child = RandomReplace(parent, t, config, rng);
          break;
        }
        case MutationStrategy::kInsert:
          child = InsertAgent(parent, config, rng);
          break;
      }
    } catch (const MutationError&) {
      continue;
    }
    child->case_id = case_id;
    child->lineage.parent_id = parent.case_id;
    child->lineage.strategy = std::string(StrategyName(strategy));
    child->lineage.generation = parent.lineage.generation + 1;
    if (!Validate(*child).ok()) continue;
    batch.cases.push_back(std::move(*child));
  }
  return batch;
}

}  // namespace scenefuzz
