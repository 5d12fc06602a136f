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

#include "scenefuzz/sim_kernel.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace scenefuzz {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string Fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

// Extent of a rectangle in a lane's (station, offset) coordinates, with
// `sign` = -1 flipping both axes for travel against the lane direction.
struct LaneExtent {
  double s_min = kInf;
  double s_max = -kInf;
  double l_min = kInf;
  double l_max = -kInf;
};

LaneExtent Project(const OrientedRect& rect, const Lane& lane, double sign) {
  LaneExtent e;
  for (const Vec2& c : rect.Corners()) {
    const double s = sign * lane.StationOf(c);
    const double l = sign * lane.OffsetOf(c);
    e.s_min = std::min(e.s_min, s);
    e.s_max = std::max(e.s_max, s);
    e.l_min = std::min(e.l_min, l);
    e.l_max = std::max(e.l_max, l);
  }
  return e;
}

double TravelSign(const World& w, int lane) {
  const auto& lanes = w.map.lanes();
  return Dot(lanes[lane].Direction(), lanes[w.home_lane].Direction()) >= 0.0
             ? 1.0
             : -1.0;
}

struct Obstacle {
  const NpcState* npc = nullptr;
  double gap = kInf;
};

// Nearest perceived agent ahead of the ego inside the corridor of `lane`.
Obstacle NearestAhead(const World& w, int lane_index, double range,
                      const KernelConfig& config) {
  const Lane& lane = w.map.lanes()[lane_index];
  const double sign = TravelSign(w, lane_index);
  const double ego_s = sign * lane.StationOf(w.ego.position);
  const double front = ego_s + w.ego.length / 2.0;
  const double half = w.ego.width / 2.0 + config.corridor_margin;
  Obstacle best;
  for (const NpcState& npc : w.npcs) {
    const LaneExtent e = Project(npc.body.Footprint(), lane, sign);
    if (e.l_max < -half || e.l_min > half) continue;
    if (e.s_max <= ego_s) continue;
    const double gap = e.s_min - front;
    if (gap > range) continue;
    if (gap < best.gap) best = {&npc, gap};
  }
  return best;
}

const NpcState* FindNpc(const World& w, const std::string& id) {
  for (const NpcState& npc : w.npcs) {
    if (npc.id == id) return &npc;
  }
  return nullptr;
}

// Borrowing ends once the passed obstacle is behind the ego and the home
// lane is free over a window ahead of it.
bool HomeLaneClear(const World& w, double range, const KernelConfig& config) {
  const Lane& home = w.map.lanes()[w.home_lane];
  const double ego_s = home.StationOf(w.ego.position);
  const double rear = ego_s - w.ego.length / 2.0;
  const double front = ego_s + w.ego.length / 2.0;
  if (const NpcState* passed = FindNpc(w, w.passing_id)) {
    if (rear <= Project(passed->body.Footprint(), home, 1.0).s_max + 1.0) {
      return false;
    }
  }
  const double window_end =
      front + config.borrow_trigger_gap +
      config.borrow_trigger_headway * w.ego.speed + 2.0;
  const double half = w.ego.width / 2.0 + config.corridor_margin;
  for (const NpcState& npc : w.npcs) {
    const LaneExtent e = Project(npc.body.Footprint(), home, 1.0);
    if (e.l_max < -half || e.l_min > half) continue;
    if (e.s_max < rear - 1.0 || e.s_min > std::min(window_end, front + range))
      continue;
    return false;
  }
  return true;
}

struct SpeedConstraint {
  double speed = kInf;
  PlannerCause cause = PlannerCause::kCruise;
  const NpcState* obstacle = nullptr;
  double gap = kInf;
};

// Speed allowed by the nearest obstacle in `lane`, ignoring lane borrowing.
SpeedConstraint ObstacleSpeed(const World& w, int lane, double range,
                              const KernelConfig& config) {
  SpeedConstraint c;
  const Obstacle ob = NearestAhead(w, lane, range, config);
  if (ob.npc == nullptr) return c;
  c.obstacle = ob.npc;
  c.gap = ob.gap;
  const VehicleState& body = ob.npc->body;
  if (body.speed < config.stationary_speed) {
    c.cause = PlannerCause::kStationaryObstacle;
    c.speed = std::sqrt(2.0 * config.comfortable_decel *
                        std::max(0.0, ob.gap - config.standstill_gap));
    return c;
  }
  const Lane& l = w.map.lanes()[lane];
  const double along =
      body.speed * Dot(UnitFromHeading(body.heading),
                       TravelSign(w, lane) * l.Direction());
  const double lead = std::max(0.0, along);
  const double follow =
      lead + 0.5 * (ob.gap - (config.follow_gap + config.follow_headway * lead));
  const double safe = std::sqrt(lead * lead + 2.0 * config.comfortable_decel *
                                                  std::max(0.0, ob.gap - 2.0));
  c.cause = PlannerCause::kMovingObstacle;
  c.speed = std::max(0.0, std::min(follow, safe));
  return c;
}

// Speed that brings the ego to rest just before a red or yellow stop line,
// when that is possible within max_decel.
SpeedConstraint LightSpeed(const World& w, const KernelConfig& config) {
  SpeedConstraint c;
  const auto& xs = w.map.intersections();
  const double v = w.ego.speed;
  for (size_t i = 0; i < xs.size(); ++i) {
    const LightColor color = w.LightAt(i, w.time);
    if (color == LightColor::kGreen) continue;
    for (const StopLine& sl : xs[i].stop_lines) {
      if (!sl.Governs(w.ego.position, w.ego.heading)) continue;
      const double d_true = sl.line_station - sl.StationOf(w.ego.Front());
      if (d_true <= 0.0) continue;
      // Too close to stop short of the line even at full braking: go.
      if (v * v / (2.0 * d_true) > config.max_decel) continue;
      const double d = d_true - config.stop_line_margin;
      double need;
      if (d > 0.0) {
        need = v * v / (2.0 * d);
      } else {
        need = v < 1e-9 ? 0.0 : kInf;
      }
      need = std::min(need, config.max_decel);
      // The line only governs once one more step of acceleration could
      // leave the ego unable to stop comfortably in front of it.
      const double comfortable =
          std::sqrt(2.0 * config.comfortable_decel * std::max(0.0, d));
      if (comfortable > v + config.max_accel * config.dt) continue;
      const double speed = std::max({0.0, v - need * config.dt, comfortable});
      if (speed < c.speed) {
        c.speed = speed;
        c.cause = PlannerCause::kLight;
        c.gap = d_true;
      }
    }
  }
  return c;
}

}  // namespace

void KernelConfig::Check() const {
  if (!(dt > 0) || !(speed_limit > 0) || !(max_accel > 0) ||
      !(max_decel > 0) || !(comfortable_decel > 0) || !(wheelbase > 0) ||
      !(max_steer > 0) || !(max_steer_rate > 0) ||
      !(base_detection_range > 0) || rain_fog_coeff < 0 ||
      rain_fog_coeff > 1 || light_coeff < 0 || light_coeff > 1) {
    throw std::invalid_argument("invalid kernel configuration");
  }
}

double DetectionRange(const Environment& env, const KernelConfig& config) {
  return config.base_detection_range *
         (1.0 - config.rain_fog_coeff * std::max(env.rain, env.fog)) *
         (1.0 - config.light_coeff + config.light_coeff * env.light_intensity);
}

LightColor LightColorAt(const TrafficLightPlan& plan, double t) {
  double total = 0.0;
  for (const LightPhase& p : plan.schedule) total += p.duration;
  if (plan.schedule.empty() || !(total > 0)) return LightColor::kGreen;
  const double tau = std::fmod(std::max(0.0, t), total);
  double end = 0.0;
  for (const LightPhase& p : plan.schedule) {
    end += p.duration;
    if (tau < end) return p.color;
  }
  return plan.schedule.back().color;
}

VehicleState AdvanceBicycle(const VehicleState& s, double accel, double steer,
                            const KernelConfig& config) {
  VehicleState n = s;
  const double max_delta = config.max_steer_rate * config.dt;
  n.steer = std::clamp(steer, s.steer - max_delta, s.steer + max_delta);
  n.steer = std::clamp(n.steer, -config.max_steer, config.max_steer);
  n.speed = std::max(0.0, s.speed + accel * config.dt);
  const double v = 0.5 * (s.speed + n.speed);
  const double dtheta = v / config.wheelbase * std::tan(n.steer) * config.dt;
  const double mid = s.heading + dtheta / 2.0;
  n.position = s.position + (v * config.dt) * UnitFromHeading(mid);
  n.heading = NormalizeAngle(s.heading + dtheta);
  return n;
}

double PursuitSteer(const VehicleState& s, Vec2 target,
                    const KernelConfig& config) {
  const Vec2 d = target - s.position;
  const double dist = std::max(Norm(d), 1e-6);
  const Vec2 u = UnitFromHeading(s.heading);
  const double alpha = std::atan2(Cross(u, d), Dot(u, d));
  return std::atan(2.0 * config.wheelbase * std::sin(alpha) / dist);
}

std::string_view PlannerModeName(PlannerMode mode) {
  switch (mode) {
    case PlannerMode::kLaneFollow:
      return "lane_follow";
    case PlannerMode::kStop:
      return "stop";
    case PlannerMode::kBorrowLeftLane:
      return "borrow_left_lane";
  }
  return "unknown";
}

LightColor World::LightAt(size_t intersection, double t) const {
  const std::string& id = map.intersections()[intersection].light_id;
  for (const TrafficLightPlan& plan : lights) {
    if (plan.light_id == id) return LightColorAt(plan, t);
  }
  return LightColor::kGreen;
}

double World::RouteProgress() const {
  const Vec2 d = route_end - route_start;
  const double len = Norm(d);
  if (len <= 0.0) return 0.0;
  return Dot(ego.position - route_start, d) / len;
}

World MakeWorld(const TestCase& tc, const KernelConfig& config) {
  config.Check();
  const StaticConfig& sc = tc.static_config;
  const DrivingArea& area = sc.driving_area;
  World w;
  try {
    w.map = LaneMap::BuiltIn(area.Width(), area.Height());
  } catch (const std::invalid_argument& e) {
    throw ScenarioRejected(e.what());
  }
  w.origin = {area.min_easting, area.min_northing};
  w.ego.position = w.ToLocal(sc.start_pose.easting, sc.start_pose.northing);
  w.ego.heading = NormalizeAngle(sc.start_pose.heading);
  w.route_start = w.ego.position;
  w.route_end = w.ToLocal(sc.end_point.easting, sc.end_point.northing);
  const std::optional<int> lane = w.map.LaneAlong(w.ego.position, w.ego.heading);
  if (!lane) {
    throw ScenarioRejected("ego start is not on a lane facing its heading");
  }
  w.home_lane = *lane;
  w.ego_lane = *lane;
  for (const NpcAgent& a : tc.dynamic_config.npcs) {
    NpcState n;
    n.id = a.agent_id;
    n.kind = a.kind;
    const Dimensions dim = AgentDimensions(a.kind);
    n.body.length = dim.length;
    n.body.width = dim.width;
    n.body.position = w.ToLocal(a.spawn_pose.easting, a.spawn_pose.northing);
    n.body.heading = NormalizeAngle(a.spawn_pose.heading);
    n.behavior = a.behavior;
    if (a.kind == AgentKind::kTrafficCone) {
      n.behavior = Stationary{};
    } else if (const auto* lf = std::get_if<LaneFollow>(&n.behavior)) {
      n.body.speed = lf->speed;
      n.lane = w.map.LaneAlong(n.body.position, n.body.heading).value_or(-1);
    } else if (auto* wp = std::get_if<WaypointPath>(&n.behavior)) {
      for (Waypoint& p : wp->waypoints) {
        const Vec2 local = w.ToLocal(p.easting, p.northing);
        p.easting = local.x;
        p.northing = local.y;
      }
      if (!wp->waypoints.empty()) n.body.speed = wp->waypoints.front().speed;
    }
    w.npcs.push_back(std::move(n));
  }
  w.lights = tc.dynamic_config.traffic_lights;
  w.environment = tc.dynamic_config.environment;
  return w;
}

PlannerDecision PlanEgo(const World& w, const KernelConfig& config) {
  const double range = DetectionRange(w.environment, config);
  PlannerDecision d;
  d.target_lane = w.ego_lane;
  d.target_speed = config.speed_limit;
  if (d.target_lane != w.home_lane && HomeLaneClear(w, range, config)) {
    d.target_lane = w.home_lane;
  }
  const bool borrowing = d.target_lane != w.home_lane;
  // The seeded defect: the lane to be borrowed is never inspected, neither
  // its boundary type nor what occupies it.
  const bool inspects_borrowed_lane = config.fixed_planner;

  const SpeedConstraint light = LightSpeed(w, config);
  SpeedConstraint obstacle =
      borrowing && !inspects_borrowed_lane
          ? SpeedConstraint{}
          : ObstacleSpeed(w, d.target_lane, range, config);

  if (light.cause == PlannerCause::kLight) {
    // Rule 1: stop for the light; never borrow while doing so.
    d.mode = borrowing ? PlannerMode::kBorrowLeftLane : PlannerMode::kStop;
    d.cause = PlannerCause::kLight;
    d.target_speed = std::min({config.speed_limit, light.speed, obstacle.speed});
    d.obstacle_gap = light.gap;
    return d;
  }

  d.mode = borrowing ? PlannerMode::kBorrowLeftLane : PlannerMode::kLaneFollow;
  if (obstacle.cause == PlannerCause::kStationaryObstacle && !borrowing) {
    const Lane& lane = w.map.lanes()[w.home_lane];
    bool may_borrow = lane.left_neighbor >= 0;
    if (may_borrow && inspects_borrowed_lane) {
      may_borrow = w.map.boundaries()[lane.left_boundary].type ==
                   BoundaryType::kDashedWhite;
    }
    if (!may_borrow) {
      d.mode = PlannerMode::kStop;
    } else if (obstacle.gap <= config.borrow_trigger_gap +
                                   config.borrow_trigger_headway * w.ego.speed) {
      // Rule 3: go around it through the left lane.
      d.mode = PlannerMode::kBorrowLeftLane;
      d.cause = PlannerCause::kBorrow;
      d.target_lane = lane.left_neighbor;
      d.obstacle_id = obstacle.obstacle->id;
      d.obstacle_gap = obstacle.gap;
      const SpeedConstraint next =
          inspects_borrowed_lane
              ? ObstacleSpeed(w, d.target_lane, range, config)
              : SpeedConstraint{};
      d.target_speed = std::min(config.speed_limit, next.speed);
      return d;
    } else {
      obstacle.speed = std::min(obstacle.speed, config.borrow_approach_speed);
    }
  }
  if (obstacle.obstacle != nullptr) {
    d.cause = obstacle.cause;
    d.obstacle_id = obstacle.obstacle->id;
    d.obstacle_gap = obstacle.gap;
  }
  d.target_speed = std::min(config.speed_limit, obstacle.speed);
  return d;
}

void StepWorld(World& w, const PlannerDecision& decision,
               const KernelConfig& config) {
  if (decision.target_lane != w.home_lane && w.ego_lane == w.home_lane) {
    w.passing_id = decision.obstacle_id;
  } else if (decision.target_lane == w.home_lane) {
    w.passing_id.clear();
  }
  w.ego_lane = decision.target_lane;

  const Lane& lane = w.map.lanes()[w.ego_lane];
  const double sign = TravelSign(w, w.ego_lane);
  const double lookahead =
      std::max(config.min_lookahead, config.lookahead_time * w.ego.speed);
  const double s = sign * lane.StationOf(w.ego.position);
  const Vec2 target = lane.PointAt(sign * (s + lookahead));
  const double accel =
      std::clamp((decision.target_speed - w.ego.speed) / config.dt,
                 -config.max_decel, config.max_accel);
  w.ego = AdvanceBicycle(w.ego, accel, PursuitSteer(w.ego, target, config),
                         config);

  for (NpcState& npc : w.npcs) {
    if (npc.halted) continue;
    VehicleState& b = npc.body;
    if (const auto* lf = std::get_if<LaneFollow>(&npc.behavior)) {
      b.speed = lf->speed;
      double steer = 0.0;
      if (npc.lane >= 0) {
        const Lane& l = w.map.lanes()[npc.lane];
        const double ld =
            std::max(config.min_lookahead, config.lookahead_time * b.speed);
        steer = PursuitSteer(b, l.PointAt(l.StationOf(b.position) + ld), config);
      }
      if (npc.kind == AgentKind::kPedestrian) steer = 0.0;
      b = AdvanceBicycle(b, 0.0, steer, config);
    } else if (const auto* wp = std::get_if<WaypointPath>(&npc.behavior)) {
      const bool walker = npc.kind == AgentKind::kPedestrian;
      const auto& pts = wp->waypoints;
      // A vehicle that starts receding from a waypoint inside its turning
      // circle would orbit it forever; it gives up on that waypoint instead.
      const double turn_diameter =
          2.0 * config.wheelbase / std::tan(config.max_steer);
      while (npc.next_waypoint < pts.size()) {
        const Waypoint& p = pts[npc.next_waypoint];
        const double dist = Norm(Vec2{p.easting, p.northing} - b.position);
        const bool missed = !walker && npc.waypoint_distance >= 0.0 &&
                            dist > npc.waypoint_distance &&
                            dist < turn_diameter;
        if (dist > 1.5 && !missed) {
          npc.waypoint_distance = dist;
          break;
        }
        ++npc.next_waypoint;
        npc.waypoint_distance = -1.0;
      }
      if (npc.next_waypoint >= pts.size()) {
        b.speed = 0.0;
        continue;
      }
      const Waypoint& p = pts[npc.next_waypoint];
      const Vec2 goal{p.easting, p.northing};
      b.speed = p.speed;
      if (walker) {
        const Vec2 d = goal - b.position;
        b.heading = std::atan2(d.y, d.x);
        b.position = b.position + (b.speed * config.dt) * UnitFromHeading(b.heading);
      } else {
        b = AdvanceBicycle(b, 0.0, PursuitSteer(b, goal, config), config);
      }
    }
  }
  ++w.step;
  w.time = w.step * config.dt;
}

std::vector<CrashEvent> DetectCollisions(const std::vector<Body>& bodies,
                                         double time) {
  std::vector<CrashEvent> events;
  for (size_t i = 0; i < bodies.size(); ++i) {
    for (size_t j = i + 1; j < bodies.size(); ++j) {
      const Body& a = bodies[i];
      const Body& b = bodies[j];
      if (!RectsOverlap(a.footprint, b.footprint)) continue;
      const auto ca = a.footprint.Corners();
      const auto cb = b.footprint.Corners();
      const Polygon overlap = ClipConvex(Polygon(ca.begin(), ca.end()),
                                         Polygon(cb.begin(), cb.end()));
      Vec2 contact;
      if (overlap.empty()) {
        // Touching only along an edge or at a corner.
        contact = 0.5 * (a.footprint.center + b.footprint.center);
      } else {
        contact = Centroid(overlap);
      }
      CrashEvent e;
      e.time = time;
      e.party_a = a.id;
      e.party_b = b.id;
      e.contact_point = {contact.x, contact.y};
      e.relative_speed_kmh = Norm(a.velocity - b.velocity) * 3.6;
      events.push_back(std::move(e));
    }
  }
  return events;
}

bool IsRearImpact(const VehicleState& striker, const VehicleState& struck,
                  Vec2 contact) {
  const Vec2 u = UnitFromHeading(struck.heading);
  if (Dot(contact - struck.position, u) > -struck.length / 4.0) return false;
  if (Dot(UnitFromHeading(striker.heading), u) < std::cos(std::numbers::pi / 4))
    return false;
  return Dot(striker.position - struck.position, u) < 0.0;
}

LiabilityVerdict JudgeLiability(const CrashEvent& crash, const CrashParty& a,
                                const CrashParty& b,
                                const LiabilityHistory& history,
                                const LaneMap& map, int ego_lane) {
  LiabilityVerdict v;
  if (!a.is_ego && !b.is_ego) {
    v.ego_at_fault = false;
    v.rule = "N0";
    v.narrative = a.id + " and " + b.id + " collided without the ego";
    return v;
  }
  const CrashParty& ego = a.is_ego ? a : b;
  const CrashParty& other = a.is_ego ? b : a;
  const double t = crash.time;
  const Vec2 contact{crash.contact_point.easting, crash.contact_point.northing};

  for (const auto& iv : history.double_yellow) {
    if (iv.end >= t - kLookbackDoubleYellow && iv.begin <= t) {
      v.rule = "L1";
      v.narrative = "ego crossed the solid double yellow line" +
                    Fmt(" at %.2f s", iv.begin) + " and then hit " + other.id;
      return v;
    }
  }
  for (double run : history.avoidable_red_runs) {
    if (run >= t - kLookbackDoubleYellow && run <= t) {
      v.rule = "L1";
      v.narrative = "ego ran a red light" + Fmt(" at %.2f s", run) +
                    " and then hit " + other.id;
      return v;
    }
  }
  if (other.state.speed < 0.3) {
    v.rule = "L2";
    v.narrative = "ego struck stationary " +
                  std::string(AgentKindName(other.kind)) + " " + other.id;
    return v;
  }
  if (IsVehicle(other.kind) && ego_lane >= 0 &&
      map.lanes()[ego_lane].Contains(other.state.position) &&
      IsRearImpact(ego.state, other.state, contact)) {
    v.rule = "L2";
    v.narrative = "ego struck the rear of " + other.id + " in its own lane";
    return v;
  }
  if (IsRearImpact(other.state, ego.state, contact)) {
    v.ego_at_fault = false;
    v.rule = "L3";
    v.narrative = other.id + " struck the rear of the ego";
    return v;
  }
  for (const auto& [id, when] : history.lane_entries) {
    if (id == other.id && when >= t - kLookbackCutIn && when <= t) {
      v.ego_at_fault = false;
      v.rule = "L3";
      v.narrative = other.id + " entered the ego's lane" +
                    Fmt(" %.2f s before impact", t - when);
      return v;
    }
  }
  v.rule = "L4";
  v.narrative = "ego collided with " + other.id +
                "; no exonerating circumstance";
  return v;
}

namespace {

// One simulation run with its bookkeeping.
class Episode {
 public:
  Episode(World world, const KernelConfig& config)
      : w_(std::move(world)), config_(config) {
    const size_t n = w_.npcs.size();
    const size_t lanes = w_.map.lanes().size();
    in_lane_.assign(n, std::vector<char>(lanes, 0));
    lane_entry_.assign(n, std::vector<double>(lanes, -kInf));
    for (const Intersection& x : w_.map.intersections()) {
      red_onset_need_.emplace_back(x.stop_lines.size(), kInf);
      front_station_.emplace_back(x.stop_lines.size(), 0.0);
    }
    prev_color_.assign(w_.map.intersections().size(), LightColor::kGreen);
    npc_pair_hit_.assign(n * n, 0);
  }

  SimOutcome Run(double horizon, std::vector<TraceStep>* trace) {
    const int steps =
        std::max(1, static_cast<int>(std::ceil(horizon / config_.dt - 1e-9)));
    Record();
    bool done = Observe(/*initial=*/true);
    const double range = DetectionRange(w_.environment, config_);
    while (!done && w_.step < steps) {
      const PlannerDecision decision = PlanEgo(w_, config_);
      if (trace != nullptr) trace->push_back({w_.time, decision, range});
      StepWorld(w_, decision, config_);
      Record();
      done = Observe(/*initial=*/false);
    }
    CloseDoubleYellow();
    if (out_.crashes.empty() && out_.completed != Completion::kReachedGoal) {
      out_.completed = Completion::kTimedOut;
    }
    out_.min_obstacle_distance = std::min(min_distance_, kDistanceCap);
    if (!out_.crashes.empty()) out_.min_obstacle_distance = 0.0;
    return std::move(out_);
  }

 private:
  void Record() {
    const GeoPoint p = w_.ToGeo(w_.ego.position);
    out_.trajectory.samples.push_back(
        {w_.time, p.easting, p.northing, w_.ego.heading, w_.ego.speed});
  }

  // Returns true when the run ends in the current state.
  bool Observe(bool initial) {
    TrackLanes(initial);
    TrackDoubleYellow();
    TrackLights(initial);
    if (CheckCollisions()) return true;
    const Vec2 p = w_.ego.position;
    const bool inside = p.x >= 0 && p.y >= 0 && p.x <= w_.map.width() &&
                        p.y <= w_.map.height();
    if (!inside || !w_.map.OnRoad(p)) {
      out_.violations.push_back(
          {std::string(kOffRoad), w_.time, std::string(kEgoId),
           "ego left the mapped lanes"});
      out_.completed = Completion::kTimedOut;
      return true;
    }
    if (w_.RouteProgress() >= w_.RouteLength() - 0.5) {
      out_.completed = Completion::kReachedGoal;
      return true;
    }
    return false;
  }

  void TrackLanes(bool initial) {
    const auto& lanes = w_.map.lanes();
    for (size_t i = 0; i < w_.npcs.size(); ++i) {
      const OrientedRect fp = w_.npcs[i].body.Footprint();
      for (size_t j = 0; j < lanes.size(); ++j) {
        const char now = RectsOverlap(fp, lanes[j].Area()) ? 1 : 0;
        if (now && !in_lane_[i][j] && !initial) lane_entry_[i][j] = w_.time;
        in_lane_[i][j] = now;
      }
    }
  }

  void TrackDoubleYellow() {
    const OrientedRect fp = w_.ego.Footprint();
    bool on = false;
    for (const Boundary& b : w_.map.boundaries()) {
      if (b.type != BoundaryType::kSolidDoubleYellow) continue;
      const Vec2 d = b.b - b.a;
      const OrientedRect line{b.a + 0.5 * d, std::atan2(d.y, d.x), Norm(d),
                              0.0};
      if (RectsOverlap(fp, line)) {
        on = true;
        break;
      }
    }
    // Having crossed, the ego stays in violation until it has fully left
    // the opposing lanes it entered.
    if (!on && dy_open_) {
      const auto& lanes = w_.map.lanes();
      const Vec2 home = lanes[w_.home_lane].Direction();
      for (const Lane& lane : lanes) {
        if (Dot(lane.Direction(), home) < -0.5 &&
            RectsOverlap(fp, lane.Area())) {
          on = true;
          break;
        }
      }
    }
    if (on && !dy_open_) {
      dy_open_ = true;
      history_.double_yellow.push_back({w_.time, w_.time});
      dy_violation_ = out_.violations.size();
      out_.violations.push_back({std::string(kDoubleYellowCrossing), w_.time,
                                 std::string(kEgoId), ""});
    }
    if (on) history_.double_yellow.back().end = w_.time;
    if (!on && dy_open_) CloseDoubleYellow();
  }

  void CloseDoubleYellow() {
    if (!dy_open_) return;
    dy_open_ = false;
    const auto& iv = history_.double_yellow.back();
    out_.violations[dy_violation_].detail =
        "ego across the solid double yellow line for" +
        Fmt(" %.2f s", iv.end - iv.begin);
  }

  void TrackLights(bool initial) {
    const auto& xs = w_.map.intersections();
    const double v = w_.ego.speed;
    for (size_t i = 0; i < xs.size(); ++i) {
      const LightColor color = w_.LightAt(i, w_.time);
      const bool onset = color == LightColor::kRed &&
                         (initial || prev_color_[i] != LightColor::kRed);
      for (size_t k = 0; k < xs[i].stop_lines.size(); ++k) {
        const StopLine& sl = xs[i].stop_lines[k];
        const double front = sl.StationOf(w_.ego.Front());
        const bool governed = sl.Governs(w_.ego.position, w_.ego.heading);
        if (onset) {
          // Deceleration needed, at the moment the light turned red, to stop
          // with the planner's margin before the line.
          double need = kInf;
          const double d = sl.line_station - front - config_.stop_line_margin;
          if (governed && sl.line_station - front > 0.0) {
            if (d > 0.0) {
              need = v * v / (2.0 * d);
            } else if (v < 1e-9) {
              need = 0.0;
            }
          }
          red_onset_need_[i][k] = need;
        }
        if (!initial && governed && color == LightColor::kRed &&
            front_station_[i][k] < sl.line_station &&
            front >= sl.line_station) {
          const bool avoidable =
              red_onset_need_[i][k] <= config_.comfortable_decel;
          if (avoidable) history_.avoidable_red_runs.push_back(w_.time);
          out_.violations.push_back(
              {std::string(kRedLight), w_.time, std::string(kEgoId),
               std::string(avoidable ? "avoidable" : "unavoidable") +
                   " (light " + xs[i].light_id + ")"});
        }
        front_station_[i][k] = front;
      }
      prev_color_[i] = color;
    }
  }

  bool CheckCollisions() {
    std::vector<Body> bodies;
    bodies.reserve(w_.npcs.size() + 1);
    bodies.push_back({std::string(kEgoId), w_.ego.Footprint(),
                      w_.ego.Velocity()});
    for (const NpcState& n : w_.npcs) {
      bodies.push_back({n.id, n.body.Footprint(), n.body.Velocity()});
    }
    const OrientedRect ego_fp = w_.ego.Footprint();
    for (const NpcState& n : w_.npcs) {
      const double d = RectsOverlap(ego_fp, n.body.Footprint())
                           ? 0.0
                           : std::max(RectDistance(ego_fp, n.body.Footprint()),
                                      1e-9);
      min_distance_ = std::min(min_distance_, d);
    }
    const std::vector<CrashEvent> events = DetectCollisions(bodies, w_.time);
    const size_t n = w_.npcs.size();
    for (const CrashEvent& e : events) {
      if (e.party_a == kEgoId) continue;
      size_t ia = 0, ib = 0;
      for (size_t i = 0; i < n; ++i) {
        if (w_.npcs[i].id == e.party_a) ia = i;
        if (w_.npcs[i].id == e.party_b) ib = i;
      }
      if (npc_pair_hit_[ia * n + ib]) continue;
      npc_pair_hit_[ia * n + ib] = 1;
      w_.npcs[ia].halted = w_.npcs[ib].halted = true;
      w_.npcs[ia].body.speed = w_.npcs[ib].body.speed = 0.0;
      out_.violations.push_back(
          {std::string(kNpcCollision), w_.time, e.party_a,
           e.party_a + " collided with " + e.party_b +
               Fmt(" at %.1f km/h", e.relative_speed_kmh)});
    }
    for (const CrashEvent& e : events) {
      if (e.party_a != kEgoId) continue;
      const NpcState* other = FindNpc(w_, e.party_b);
      std::optional<int> lane = w_.map.LaneAlong(w_.ego.position, w_.ego.heading);
      if (!lane) {
        for (size_t j = 0; j < w_.map.lanes().size(); ++j) {
          if (w_.map.lanes()[j].Contains(w_.ego.position)) {
            lane = static_cast<int>(j);
            break;
          }
        }
      }
      LiabilityHistory history = history_;
      if (lane) {
        for (size_t i = 0; i < n; ++i) {
          const double when = lane_entry_[i][*lane];
          if (when > -kInf) history.lane_entries.push_back({w_.npcs[i].id, when});
        }
      }
      CrashParty ego{std::string(kEgoId), AgentKind::kSedan, w_.ego, true};
      CrashParty npc{other->id, other->kind, other->body, false};
      const LiabilityVerdict verdict =
          JudgeLiability(e, ego, npc, history, w_.map, lane.value_or(-1));
      CrashEvent geo = e;
      geo.contact_point = w_.ToGeo({e.contact_point.easting,
                                    e.contact_point.northing});
      out_.crashes.push_back(std::move(geo));
      out_.verdicts.push_back(verdict);
      out_.completed = Completion::kCollided;
      return true;
    }
    return false;
  }

  World w_;
  const KernelConfig& config_;
  SimOutcome out_;
  LiabilityHistory history_;
  double min_distance_ = kInf;
  bool dy_open_ = false;
  size_t dy_violation_ = 0;
  std::vector<std::vector<char>> in_lane_;
  std::vector<std::vector<double>> lane_entry_;
  std::vector<std::vector<double>> red_onset_need_;
  std::vector<std::vector<double>> front_station_;
  std::vector<LightColor> prev_color_;
  std::vector<char> npc_pair_hit_;
};

}  // namespace

KernelSimulator::KernelSimulator(KernelConfig config) : config_(config) {
  config_.Check();
}

SimOutcome KernelSimulator::Run(const TestCase& test_case, double horizon) {
  return RunTraced(test_case, horizon, nullptr);
}

SimOutcome KernelSimulator::RunTraced(const TestCase& test_case,
                                      double horizon,
                                      std::vector<TraceStep>* trace) const {
  if (!(horizon > 0)) throw std::invalid_argument("horizon must be positive");
  const auto started = std::chrono::steady_clock::now();
  Episode episode(MakeWorld(test_case, config_), config_);
  SimOutcome out = episode.Run(horizon, trace);
  out.wall_time = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - started)
                      .count();
  return out;
}

}  // namespace scenefuzz
