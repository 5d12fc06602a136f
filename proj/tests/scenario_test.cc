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

#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "scenefuzz/random_scene.h"
#include "scenefuzz/rng.h"
#include "test_util.h"

namespace scenefuzz {
namespace {

using nlohmann::json;
using testing::DemoCase;
using testing::kDemoArea;

json DemoJson() { return TestCaseToJson(DemoCase()); }

TEST(ParseTestCase, ReadsFig5DrivingArea) {
  const TestCase tc = DemoCase();
  EXPECT_EQ(tc.static_config.driving_area, kDemoArea);
  EXPECT_EQ(tc.static_config.start_pose.easting, 553035.9);
  EXPECT_TRUE(Validate(tc).ok());
}

TEST(ParseTestCase, DegenerateAreaIsSemanticViolation) {
  json doc = DemoJson();
  doc["static"]["drivingArea"]["maxEasting"] =
      doc["static"]["drivingArea"]["minEasting"];
  try {
    ParseTestCase(doc.dump());
    FAIL() << "expected SemanticViolation";
  } catch (const SemanticViolation& e) {
    EXPECT_NE(e.path().find("drivingArea"), std::string::npos) << e.path();
  }
}

TEST(ParseTestCase, MalformedTextIsMalformedJson) {
  EXPECT_THROW(ParseTestCase("{\"caseId\": "), MalformedJson);
}

TEST(ParseTestCase, UnknownKeysArePreserved) {
  json doc = DemoJson();
  doc["dynamic"]["surprise"] = 1;
  doc["vendorTag"] = {{"x", "y"}};
  const TestCase tc = ParseTestCase(doc.dump());
  EXPECT_EQ(tc.dynamic_config.extras.at("surprise"), 1);
  const json back = json::parse(SerializeTestCase(tc));
  EXPECT_EQ(back.at("dynamic").at("surprise"), 1);
  EXPECT_EQ(back.at("vendorTag").at("x"), "y");
}

TEST(ParseTestCase, WrongTypeNamesTheField) {
  json doc = DemoJson();
  doc["static"]["start"]["easting"] = "east";
  try {
    ParseTestCase(doc.dump());
    FAIL() << "expected SchemaViolation";
  } catch (const SchemaViolation& e) {
    EXPECT_EQ(e.path(), "static.start.easting");
  }
}

TEST(SerializeTestCase, EmptyNpcListStaysExplicit) {
  const std::string text = SerializeTestCase(DemoCase());
  EXPECT_NE(text.find("\"npcs\": []"), std::string::npos) << text;
}

TEST(SerializeTestCase, CanonicalAndStable) {
  const TestCase tc = DemoCase();
  const std::string a = SerializeTestCase(tc);
  EXPECT_EQ(a, SerializeTestCase(tc));
  EXPECT_EQ(a, SerializeTestCase(ParseTestCase(a)));
  EXPECT_EQ(a.back(), '\n');
}

// Round trip over a generated corpus of valid documents.
TEST(SerializeTestCase, RoundTripsGeneratedCorpus) {
  const StaticConfig scene = DemoCase().static_config;
  RandomSceneConfig config;
  config.max_npcs = 6;
  Rng rng(20260101);
  for (int i = 0; i < 50; ++i) {
    TestCase tc = RandomTestCase(scene, config, rng, "c" + std::to_string(i));
    tc.rng_seed = rng.NextU64();
    ASSERT_TRUE(Validate(tc).ok());
    const TestCase back = ParseTestCase(SerializeTestCase(tc));
    EXPECT_EQ(back, tc) << "document " << i;
    EXPECT_EQ(SerializeTestCase(back), SerializeTestCase(tc));
  }
}

TEST(Validate, SpawnTooCloseToEgo) {
  TestCase tc = DemoCase();
  NpcAgent npc;
  npc.agent_id = "near";
  npc.spawn_pose = tc.static_config.start_pose;
  npc.spawn_pose.easting += 1.0;
  tc.dynamic_config.npcs.push_back(npc);
  EXPECT_TRUE(Validate(tc).HasRule("non-overlapping-spawn"));
}

TEST(Validate, SpawnAtSeparationThresholdIsFine) {
  TestCase tc = DemoCase();
  NpcAgent npc;
  npc.agent_id = "far";
  npc.spawn_pose = tc.static_config.start_pose;
  npc.spawn_pose.easting += kSpawnSeparation + 0.01;
  tc.dynamic_config.npcs.push_back(npc);
  EXPECT_TRUE(Validate(tc).ok());
}

TEST(Validate, DuplicateAgentIds) {
  TestCase tc = DemoCase();
  NpcAgent a;
  a.agent_id = "twin";
  a.spawn_pose = {553080.0, 4181716.54, 0.0};
  NpcAgent b = a;
  b.spawn_pose.easting += 10.0;
  tc.dynamic_config.npcs = {a, b};
  EXPECT_TRUE(Validate(tc).HasRule("unique-agent-ids"));
}

TEST(Validate, RangesAndSchedules) {
  TestCase tc = DemoCase();
  tc.dynamic_config.environment.rain = 1.5;
  tc.dynamic_config.traffic_lights[0].schedule[0].duration = 0.0;
  NpcAgent npc;
  npc.agent_id = "fast";
  npc.spawn_pose = {553080.0, 4181716.54, 0.0};
  npc.behavior = LaneFollow{kMaxAgentSpeed + 1.0};
  tc.dynamic_config.npcs.push_back(npc);
  const ValidationReport r = Validate(tc);
  EXPECT_TRUE(r.HasRule("environment-range"));
  EXPECT_TRUE(r.HasRule("duration-positive"));
  EXPECT_TRUE(r.HasRule("speed-range"));
}

TEST(Validate, StartOutsideArea) {
  TestCase tc = DemoCase();
  tc.static_config.start_pose.easting = kDemoArea.max_easting + 5.0;
  EXPECT_TRUE(Validate(tc).HasRule("start-inside-area"));
}

TEST(AgentKinds, NamesRoundTrip) {
  for (AgentKind k : kAllAgentKinds) {
    EXPECT_EQ(AgentKindFromName(AgentKindName(k)), k);
  }
  EXPECT_FALSE(AgentKindFromName("bicycle").has_value());
  EXPECT_TRUE(IsVehicle(AgentKind::kTruck));
  EXPECT_FALSE(IsVehicle(AgentKind::kPedestrian));
}

}  // namespace
}  // namespace scenefuzz
