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
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "scenefuzz/rng.h"
#include "test_util.h"

namespace scenefuzz {
namespace {

using testing::DemoCase;
using testing::LoadFixture;

constexpr double kPi = std::numbers::pi;
// Local y of the ego's eastbound lane in the demo area.
constexpr double kLaneE2 = 29.24;

TrafficLightPlan Always(LightColor color) {
  return {"tl_0", {{color, 60.0}}, nlohmann::json::object()};
}

// Demo scene with no NPCs and a light stuck on `color`.
TestCase EmptyDemo(LightColor color = LightColor::kGreen) {
  TestCase tc = DemoCase();
  tc.dynamic_config.npcs.clear();
  tc.dynamic_config.traffic_lights = {Always(color)};
  return tc;
}

NpcAgent Cone(const std::string& id, const TestCase& tc, double local_x,
              double local_y) {
  NpcAgent npc;
  npc.agent_id = id;
  npc.kind = AgentKind::kTrafficCone;
  const DrivingArea& a = tc.static_config.driving_area;
  npc.spawn_pose = {a.min_easting + local_x, a.min_northing + local_y, 0.0};
  return npc;
}

TEST(AdvanceBicycle, StraightLineStep) {
  const KernelConfig config;
  VehicleState s;
  s.speed = 10.0;
  const VehicleState next = AdvanceBicycle(s, 0.0, 0.0, config);
  EXPECT_NEAR(next.position.x, 0.5, 1e-12);
  EXPECT_NEAR(next.position.y, 0.0, 1e-12);
  EXPECT_EQ(next.speed, 10.0);
}

TEST(AdvanceBicycle, ZeroSpeedStaysPut) {
  const KernelConfig config;
  VehicleState s;
  s.position = {3.0, -2.0};
  s.heading = 1.1;
  for (int i = 0; i < 1000; ++i) s = AdvanceBicycle(s, 0.0, 0.0, config);
  EXPECT_EQ(s.position.x, 3.0);
  EXPECT_EQ(s.position.y, -2.0);
  EXPECT_EQ(s.heading, 1.1);
}

TEST(AdvanceBicycle, SpeedNeverNegative) {
  const KernelConfig config;
  VehicleState s;
  s.speed = 0.1;
  s = AdvanceBicycle(s, -3.0, 0.0, config);
  EXPECT_EQ(s.speed, 0.0);
}

// At 30 m/s one step moves less than any vehicle footprint is long, so
// consecutive footprints overlap and contacts cannot be stepped over.
TEST(AdvanceBicycle, NoTunnelingAtMaxSpeed) {
  const KernelConfig config;
  Rng rng(3);
  double shortest = kEgoDimensions.length;
  for (AgentKind k : kAllAgentKinds) {
    if (IsVehicle(k)) shortest = std::min(shortest, AgentDimensions(k).length);
  }
  for (int i = 0; i < 2000; ++i) {
    VehicleState s;
    s.heading = rng.Uniform(-kPi, kPi);
    s.speed = kMaxAgentSpeed;
    s.steer = rng.Uniform(-config.max_steer, config.max_steer);
    const VehicleState n = AdvanceBicycle(
        s, rng.Uniform(-3, 3), rng.Uniform(-config.max_steer, config.max_steer),
        config);
    ASSERT_LT(Norm(n.position - s.position), shortest);
    ASSERT_TRUE(RectsOverlap(s.Footprint(), n.Footprint()));
  }
}

TEST(LightColorAt, CyclicSchedule) {
  const TrafficLightPlan plan{
      "tl", {{LightColor::kRed, 2.0}, {LightColor::kGreen, 3.0}}, {}};
  EXPECT_EQ(LightColorAt(plan, 0.0), LightColor::kRed);
  EXPECT_EQ(LightColorAt(plan, 2.5), LightColor::kGreen);
  EXPECT_EQ(LightColorAt(plan, 5.5), LightColor::kRed);
  EXPECT_EQ(LightColorAt(plan, 9.99), LightColor::kGreen);
}

TEST(DetectionRange, Degradation) {
  const KernelConfig config;
  Environment clear;
  clear.light_intensity = 1.0;
  Environment fog = clear;
  fog.fog = 1.0;
  EXPECT_DOUBLE_EQ(DetectionRange(clear, config), 60.0);
  EXPECT_DOUBLE_EQ(DetectionRange(fog, config), 30.0);
  Environment dark;
  EXPECT_DOUBLE_EQ(DetectionRange(dark, config), 30.0);
}

TEST(PlanEgo, BorrowsAcrossDoubleYellowForCone) {
  TestCase tc = EmptyDemo();
  const Dimensions cone = AgentDimensions(AgentKind::kTrafficCone);
  // Ego centre at local x = 6; 15 m from its front bumper to the cone.
  const double cone_x = 6.0 + kEgoDimensions.length / 2 + 15.0 + cone.length / 2;
  tc.dynamic_config.npcs.push_back(Cone("cone", tc, cone_x, kLaneE2));
  KernelConfig config;
  World w = MakeWorld(tc, config);
  w.ego.speed = 8.0;
  const PlannerDecision d = PlanEgo(w, config);
  EXPECT_EQ(d.mode, PlannerMode::kBorrowLeftLane);
  EXPECT_EQ(d.cause, PlannerCause::kBorrow);
  ASSERT_GE(d.target_lane, 0);
  EXPECT_EQ(w.map.lanes()[d.target_lane].id, "W1");
  EXPECT_NEAR(*d.obstacle_gap, 15.0, 1e-9);
  const Lane& home = w.map.lanes()[w.home_lane];
  EXPECT_EQ(w.map.boundaries()[home.left_boundary].type,
            BoundaryType::kSolidDoubleYellow);

  config.fixed_planner = true;
  const PlannerDecision fixed = PlanEgo(MakeWorld(tc, config), config);
  EXPECT_NE(fixed.mode, PlannerMode::kBorrowLeftLane);
}

TEST(PlanEgo, StopsForRedLight) {
  const KernelConfig config;
  World w = MakeWorld(EmptyDemo(LightColor::kRed), config);
  // Stop line at local x = 56.5, 20 m beyond the front bumper.
  w.ego.position = {56.5 - 20.0 - kEgoDimensions.length / 2, kLaneE2};
  w.ego.speed = 10.0;
  const PlannerDecision d = PlanEgo(w, config);
  EXPECT_EQ(d.mode, PlannerMode::kStop);
  EXPECT_EQ(d.cause, PlannerCause::kLight);
  EXPECT_LT(d.target_speed, 10.0);
}

TEST(PlanEgo, CruisesOnGreen) {
  const KernelConfig config;
  World w = MakeWorld(EmptyDemo(), config);
  const PlannerDecision d = PlanEgo(w, config);
  EXPECT_EQ(d.mode, PlannerMode::kLaneFollow);
  EXPECT_EQ(d.target_speed, config.speed_limit);
}

// Gap to a cone at the first step the planner reacts to it.
double FirstReactionGap(double fog) {
  TestCase tc = EmptyDemo();
  tc.dynamic_config.environment = {};
  tc.dynamic_config.environment.light_intensity = 1.0;
  tc.dynamic_config.environment.fog = fog;
  tc.dynamic_config.npcs.push_back(Cone("cone", tc, 110.0, kLaneE2));
  KernelSimulator sim;
  std::vector<TraceStep> trace;
  sim.RunTraced(tc, 30.0, &trace);
  for (const TraceStep& s : trace) {
    if (s.decision.obstacle_id == "cone") return *s.decision.obstacle_gap;
  }
  return -1.0;
}

TEST(PlanEgo, FogHalvesReactionDistance) {
  const double clear = FirstReactionGap(0.0);
  const double fog = FirstReactionGap(1.0);
  ASSERT_GT(clear, 0.0);
  ASSERT_GT(fog, 0.0);
  // Reaction happens within one step's travel of the detection range.
  const double step = 11.11 * 0.05;
  EXPECT_NEAR(clear, 60.0, step + 1e-9);
  EXPECT_NEAR(fog, 30.0, step + 1e-9);
  EXPECT_NEAR(fog / clear, 0.5, 0.02);
}

// Independent separating-axis oracle over the four edge normals.
bool SatOverlap(const OrientedRect& a, const OrientedRect& b, double slack) {
  const auto corners = [](const OrientedRect& r) {
    const double c = std::cos(r.heading), s = std::sin(r.heading);
    std::array<Vec2, 4> out;
    const double hl = r.length / 2, hw = r.width / 2;
    const double sx[] = {hl, -hl, -hl, hl}, sy[] = {hw, hw, -hw, -hw};
    for (int i = 0; i < 4; ++i) {
      out[i] = {r.center.x + c * sx[i] - s * sy[i],
                r.center.y + s * sx[i] + c * sy[i]};
    }
    return out;
  };
  const auto ca = corners(a), cb = corners(b);
  for (double h : {a.heading, a.heading + kPi / 2, b.heading,
                   b.heading + kPi / 2}) {
    const Vec2 axis{std::cos(h), std::sin(h)};
    double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
    for (int i = 0; i < 4; ++i) {
      amin = std::min(amin, Dot(ca[i], axis));
      amax = std::max(amax, Dot(ca[i], axis));
      bmin = std::min(bmin, Dot(cb[i], axis));
      bmax = std::max(bmax, Dot(cb[i], axis));
    }
    if (amax + slack < bmin || bmax + slack < amin) return false;
  }
  return true;
}

Body MakeBody(const std::string& id, OrientedRect r, Vec2 v = {}) {
  return {id, r, v};
}

TEST(DetectCollisions, FarApartGivesNothing) {
  const OrientedRect r{{0, 0}, 0.0, 4.7, 1.9};
  OrientedRect s = r;
  s.center = {10.0 + 4.7, 0.0};
  EXPECT_TRUE(DetectCollisions({MakeBody("a", r), MakeBody("b", s)}, 1.0).empty());
}

TEST(DetectCollisions, IdenticalRectanglesMeetAtCentroid) {
  const OrientedRect r{{5.0, -3.0}, 0.7, 4.7, 1.9};
  const auto events = DetectCollisions(
      {MakeBody("a", r, {10.0, 0.0}), MakeBody("b", r, {0.0, 0.0})}, 2.5);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].party_a, "a");
  EXPECT_EQ(events[0].party_b, "b");
  EXPECT_EQ(events[0].time, 2.5);
  EXPECT_NEAR(events[0].contact_point.easting, 5.0, 1e-9);
  EXPECT_NEAR(events[0].contact_point.northing, -3.0, 1e-9);
  EXPECT_NEAR(events[0].relative_speed_kmh, 36.0, 1e-9);
}

TEST(DetectCollisions, MatchesSatOracle) {
  Rng rng(500);
  int checked = 0, overlapping = 0;
  while (checked < 500) {
    const auto random_rect = [&] {
      return OrientedRect{{rng.Uniform(-6, 6), rng.Uniform(-6, 6)},
                          rng.Uniform(-kPi, kPi), rng.Uniform(0.5, 6),
                          rng.Uniform(0.5, 3)};
    };
    const OrientedRect a = random_rect(), b = random_rect();
    const bool loose = SatOverlap(a, b, 1e-6), tight = SatOverlap(a, b, -1e-6);
    if (loose != tight) continue;  // touching within rounding, undecidable
    const auto events =
        DetectCollisions({MakeBody("a", a), MakeBody("b", b)}, 0.0);
    ASSERT_EQ(!events.empty(), loose) << "pair " << checked;
    if (loose) {
      ++overlapping;
      const Vec2 c{events[0].contact_point.easting,
                   events[0].contact_point.northing};
      // The centroid of the overlap lies in both rectangles.
      OrientedRect ga = a, gb = b;
      ga.length += 1e-6, ga.width += 1e-6, gb.length += 1e-6, gb.width += 1e-6;
      EXPECT_TRUE(ga.Contains(c) && gb.Contains(c));
    }
    ++checked;
  }
  EXPECT_GT(overlapping, 50);
}

CrashParty Party(const std::string& id, AgentKind kind, Vec2 p, double heading,
                 double speed, bool ego = false) {
  CrashParty party;
  party.id = id;
  party.kind = kind;
  party.is_ego = ego;
  party.state.position = p;
  party.state.heading = heading;
  party.state.speed = speed;
  const Dimensions d = ego ? kEgoDimensions : AgentDimensions(kind);
  party.state.length = d.length;
  party.state.width = d.width;
  return party;
}

CrashEvent Crash(const std::string& a, const std::string& b, Vec2 contact,
                 double t) {
  return {t, a, b, {contact.x, contact.y}, 10.0};
}

class JudgeTest : public ::testing::Test {
 protected:
  LaneMap map_ = LaneMap::BuiltIn(123.99, 61.98);
  int e2_ = map_.LaneIndex("E2");
};

TEST_F(JudgeTest, RedRunIsL1) {
  const CrashParty ego =
      Party("ego", AgentKind::kSedan, {70, kLaneE2}, 0.0, 10.0, true);
  const CrashParty npc =
      Party("car-1", AgentKind::kSedan, {72, kLaneE2 - 6}, kPi / 2, 8.0);
  LiabilityHistory h;
  h.avoidable_red_runs = {8.0};
  const LiabilityVerdict v = JudgeLiability(Crash("ego", "car-1", {71.5, 27.0}, 10.0),
                                            ego, npc, h, map_, e2_);
  EXPECT_EQ(v.rule, "L1");
  EXPECT_TRUE(v.ego_at_fault);

  // Too long ago to count.
  h.avoidable_red_runs = {4.0};
  EXPECT_NE(JudgeLiability(Crash("ego", "car-1", {71.5, 27.0}, 10.0), ego, npc,
                           h, map_, e2_)
                .rule,
            "L1");
}

TEST_F(JudgeTest, DoubleYellowWithinLookbackIsL1) {
  const CrashParty ego =
      Party("ego", AgentKind::kSedan, {70, 32.0}, 0.0, 10.0, true);
  const CrashParty cone =
      Party("c", AgentKind::kTrafficCone, {72.6, 32.0}, 0.0, 0.0);
  LiabilityHistory h;
  h.double_yellow = {{6.0, 9.0}};
  EXPECT_EQ(JudgeLiability(Crash("ego", "c", {72.35, 32.0}, 10.0), ego, cone, h,
                           map_, map_.LaneIndex("W1"))
                .rule,
            "L1");
  // Without the crossing the cone strike is L2.
  EXPECT_EQ(JudgeLiability(Crash("ego", "c", {72.35, 32.0}, 10.0), ego, cone,
                           LiabilityHistory{}, map_, map_.LaneIndex("W1"))
                .rule,
            "L2");
}

TEST_F(JudgeTest, NpcOnlyCrashIsN0) {
  const CrashParty a = Party("car-1", AgentKind::kSedan, {70, 25.74}, 0.0, 5.0);
  const CrashParty b = Party("car-2", AgentKind::kSedan, {74, 25.74}, 0.0, 0.0);
  const LiabilityVerdict v = JudgeLiability(Crash("car-1", "car-2", {72, 25.74}, 3.0),
                                            a, b, {}, map_, e2_);
  EXPECT_EQ(v.rule, "N0");
  EXPECT_FALSE(v.ego_at_fault);
}

TEST_F(JudgeTest, NpcRearImpactIsL3) {
  const CrashParty ego =
      Party("ego", AgentKind::kSedan, {50, kLaneE2}, 0.0, 0.0, true);
  const CrashParty npc =
      Party("car-1", AgentKind::kSedan, {45.4, kLaneE2}, 0.0, 4.0);
  const LiabilityVerdict v = JudgeLiability(Crash("ego", "car-1", {47.7, kLaneE2}, 5.0),
                                            ego, npc, {}, map_, e2_);
  EXPECT_EQ(v.rule, "L3");
  EXPECT_FALSE(v.ego_at_fault);
}

// Every crash gets exactly one rule from the cascade.
TEST_F(JudgeTest, RandomCrashesAlwaysGetARule) {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const bool with_ego = rng.Bernoulli(0.8);
    const auto kind = kAllAgentKinds[rng.Below(std::size(kAllAgentKinds))];
    const Vec2 p{rng.Uniform(10, 110), rng.Uniform(20, 40)};
    const CrashParty a = Party(with_ego ? "ego" : "n0", AgentKind::kSedan, p,
                               rng.Uniform(-kPi, kPi), rng.Uniform(0, 12),
                               with_ego);
    const CrashParty b =
        Party("n1", kind, p + Vec2{rng.Uniform(-3, 3), rng.Uniform(-3, 3)},
              rng.Uniform(-kPi, kPi), rng.Uniform(0, 12));
    LiabilityHistory h;
    if (rng.Bernoulli(0.3)) h.double_yellow = {{1.0, rng.Uniform(1, 10)}};
    if (rng.Bernoulli(0.3)) h.lane_entries = {{"n1", rng.Uniform(0, 10)}};
    const LiabilityVerdict v =
        JudgeLiability(Crash(a.id, b.id, p, 10.0), a, b, h, map_, e2_);
    const auto* end = std::end(kLiabilityRules);
    ASSERT_NE(std::find(std::begin(kLiabilityRules), end, v.rule), end);
    ASSERT_EQ(v.rule == "N0", !with_ego);
    ASSERT_EQ(v.ego_at_fault, v.rule != "L3" && v.rule != "N0");
  }
}

struct Expected {
  const char* fixture;
  bool fixed_planner;
  Completion completed;
  double min_distance;
  double crash_time;  // negative without a crash
  double speed_kmh;
  const char* rule;
  const char* narrative;
};

// Frozen outcomes of the scripted fixtures.
const Expected kFixtureOutcomes[] = {
    {"rear_end_by_npc", false, Completion::kCollided, 0.0, 11.80, 14.40, "L3",
     "car-1 struck the rear of the ego"},
    {"cut_in", false, Completion::kCollided, 0.0, 4.10, 28.353499, "L3",
     "car-1 entered the ego's lane 0.55 s before impact"},
    {"ego_rear_ends", false, Completion::kCollided, 0.0, 6.25, 1.98, "L2",
     "ego struck the rear of car-1 in its own lane"},
    {"defect", false, Completion::kCollided, 0.0, 6.15, 68.674198, "L1",
     "ego crossed the solid double yellow line at 3.85 s and then hit car-1"},
    {"defect", true, Completion::kTimedOut, 1.65, -1, 0, "", ""},
    {"blocked_ahead", false, Completion::kReachedGoal, 1.463928, -1, 0, "", ""},
    {"blocked_ahead", true, Completion::kTimedOut, 2.976885, -1, 0, "", ""},
    {"one_npc", false, Completion::kReachedGoal, 43.013250, -1, 0, "", ""},
};

TEST(KernelSimulator, FixtureOutcomes) {
  for (const Expected& e : kFixtureOutcomes) {
    SCOPED_TRACE(std::string(e.fixture) + (e.fixed_planner ? " fixed" : ""));
    KernelConfig config;
    config.fixed_planner = e.fixed_planner;
    KernelSimulator sim(config);
    const SimOutcome o = sim.Run(LoadFixture(e.fixture));
    EXPECT_EQ(o.completed, e.completed);
    EXPECT_NEAR(o.min_obstacle_distance, e.min_distance, 1e-6);
    if (e.crash_time < 0) {
      EXPECT_FALSE(o.HasCrash());
      continue;
    }
    ASSERT_EQ(o.crashes.size(), 1u);
    ASSERT_EQ(o.verdicts.size(), 1u);
    EXPECT_EQ(o.crashes[0].party_a, "ego");
    EXPECT_EQ(o.crashes[0].party_b, "car-1");
    EXPECT_NEAR(o.crashes[0].time, e.crash_time, 1e-9);
    EXPECT_NEAR(o.crashes[0].relative_speed_kmh, e.speed_kmh, 1e-6);
    EXPECT_EQ(o.verdicts[0].rule, e.rule);
    EXPECT_EQ(o.verdicts[0].narrative, e.narrative);
    EXPECT_NEAR(o.trajectory.samples.back().time, e.crash_time, 1e-9);
  }
}

// The lane-borrow defect crosses the double yellow; the fixed planner never
// does on the same scene.
TEST(KernelSimulator, DefectCrossesDoubleYellow) {
  const TestCase tc = LoadFixture("blocked_ahead");
  const SimOutcome bad = KernelSimulator().Run(tc);
  ASSERT_EQ(bad.violations.size(), 1u);
  EXPECT_EQ(bad.violations[0].kind, kDoubleYellowCrossing);
  EXPECT_NEAR(bad.violations[0].time, 1.25, 1e-9);
  KernelConfig fixed;
  fixed.fixed_planner = true;
  EXPECT_TRUE(KernelSimulator(fixed).Run(tc).violations.empty());
}

TEST(KernelSimulator, StoppedEgoIsStillWhenStruck) {
  const SimOutcome o = KernelSimulator().Run(LoadFixture("rear_end_by_npc"));
  EXPECT_EQ(o.trajectory.samples.back().speed, 0.0);
}

TEST(KernelSimulator, Deterministic) {
  KernelSimulator sim;
  for (const char* f : {"defect", "cut_in", "one_npc"}) {
    const TestCase tc = LoadFixture(f);
    EXPECT_EQ(SerializeOutcome(sim.Run(tc)), SerializeOutcome(sim.Run(tc)));
  }
}

TEST(KernelSimulator, TrajectoryIsTimeOrderedAtFixedStep) {
  const SimOutcome o = KernelSimulator().Run(DemoCase());
  ASSERT_GT(o.trajectory.samples.size(), 2u);
  for (size_t i = 1; i < o.trajectory.samples.size(); ++i) {
    ASSERT_NEAR(o.trajectory.samples[i].time - o.trajectory.samples[i - 1].time,
                0.05, 1e-9);
  }
}

TEST(KernelSimulator, RejectsOffLaneStart) {
  TestCase tc = EmptyDemo();
  tc.static_config.start_pose.heading = kPi;  // facing against E2
  EXPECT_THROW(KernelSimulator().Run(tc), ScenarioRejected);
}

}  // namespace
}  // namespace scenefuzz
