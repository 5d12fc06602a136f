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


#include "scenefuzz/baselines.h"

#include <algorithm>
#include <atomic>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "scenefuzz/random_scene.h"
#include "scenefuzz/report_io.h"
#include "scenefuzz/sim_kernel.h"
#include "test_util.h"

namespace scenefuzz {
namespace {

using testing::DemoCase;

class CountingSimulator : public Simulator {
 public:
  SimOutcome Run(const TestCase& tc, double horizon) override {
    ++calls_;
    return kernel_.Run(tc, horizon);
  }
  bool ThreadSafe() const override { return true; }
  size_t calls() const { return calls_; }

 private:
  KernelSimulator kernel_;
  std::atomic<size_t> calls_{0};
};

CampaignConfig Config(uint64_t seed, size_t budget = 40) {
  CampaignConfig c;
  c.master_seed = seed;
  c.iteration_budget = budget;
  return c;
}

void ExpectMonotone(const CampaignReport& r) {
  size_t total = 0;
  for (const IterationRecord& rec : r.records) {
    total += rec.new_blocks;
    ASSERT_EQ(rec.total_blocks, total);
  }
}

TEST(RandomCampaign, IndependentCasesWithoutLineage) {
  CountingSimulator sim;
  const CampaignReport r = RunRandomCampaign(DemoCase().static_config, Config(4), sim);
  EXPECT_EQ(sim.calls(), 40u);
  ASSERT_EQ(r.records.size(), 40u);
  for (size_t i = 0; i < r.records.size(); ++i) {
    EXPECT_EQ(r.records[i].method, "random");
    EXPECT_TRUE(r.records[i].parent_id.empty());
    EXPECT_FALSE(r.cases[i].lineage.parent_id.has_value());
  }
  ExpectMonotone(r);
}

TEST(RandomCampaign, Deterministic) {
  CountingSimulator sim;
  const StaticConfig scene = DemoCase().static_config;
  EXPECT_EQ(FormatReportCsv(RunRandomCampaign(scene, Config(6), sim).records),
            FormatReportCsv(RunRandomCampaign(scene, Config(6), sim).records));
}

TEST(GeneticCampaign, ExactBudgetRegardlessOfRestarts) {
  const StaticConfig scene = DemoCase().static_config;
  for (size_t budget : {1u, 5u, 40u, 120u}) {
    CountingSimulator sim;
    GeneticTrace trace;
    const CampaignReport r = RunGeneticCampaign(scene, Config(2, budget), sim, &trace);
    EXPECT_EQ(sim.calls(), budget);
    EXPECT_EQ(r.records.size(), budget);
    EXPECT_EQ(r.restarts, trace.restart_generations.size());
    for (const IterationRecord& rec : r.records) EXPECT_EQ(rec.method, "genetic");
    ExpectMonotone(r);
  }
}

// The global best carried across restarts never gets worse.
TEST(GeneticCampaign, Elitism) {
  size_t restarts = 0;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    CountingSimulator sim;
    GeneticTrace trace;
    const CampaignReport r =
        RunGeneticCampaign(DemoCase().static_config, Config(seed, 120), sim, &trace);
    ASSERT_GE(trace.best_per_generation.size(), 2u);
    for (size_t g = 1; g < trace.best_per_generation.size(); ++g) {
      EXPECT_LE(trace.best_per_generation[g], trace.best_per_generation[g - 1]);
    }
    double best = kDistanceCap;
    for (const IterationRecord& rec : r.records) {
      best = std::min(best, rec.min_distance);
    }
    EXPECT_LE(best, trace.best_per_generation.back());
    restarts += r.restarts;
  }
  EXPECT_GT(restarts, 0u);
}

TEST(GeneticCampaign, Deterministic) {
  CountingSimulator sim;
  const StaticConfig scene = DemoCase().static_config;
  EXPECT_EQ(FormatReportCsv(RunGeneticCampaign(scene, Config(7), sim).records),
            FormatReportCsv(RunGeneticCampaign(scene, Config(7), sim).records));
}

TEST(Crossover, PrefixOfOneSuffixOfOther) {
  const StaticConfig scene = DemoCase().static_config;
  RandomSceneConfig rc;
  rc.min_npcs = 1;
  rc.max_npcs = 6;
  Rng rng(12);
  for (int i = 0; i < 500; ++i) {
    const TestCase a = RandomTestCase(scene, rc, rng, "a");
    const TestCase b = RandomTestCase(scene, rc, rng, "b");
    const TestCase child = Crossover(a, b, 10, rng);
    const auto& ca = child.dynamic_config.npcs;
    const auto& pa = a.dynamic_config.npcs;
    const auto& pb = b.dynamic_config.npcs;
    // Find a cut k with child = a[0, k) ++ b[j, end) up to renamed ids.
    bool found = false;
    for (size_t k = 0; k <= std::min(pa.size(), ca.size()) && !found; ++k) {
      const size_t tail = ca.size() - k;
      if (tail > pb.size()) continue;
      bool ok = true;
      for (size_t j = 0; j < k && ok; ++j) ok = ca[j] == pa[j];
      for (size_t j = 0; j < tail && ok; ++j) {
        NpcAgent x = ca[k + j];
        x.agent_id = pb[pb.size() - tail + j].agent_id;
        ok = x == pb[pb.size() - tail + j];
      }
      found = ok;
    }
    ASSERT_TRUE(found) << "iteration " << i;
    EXPECT_EQ(child.dynamic_config.traffic_lights, a.dynamic_config.traffic_lights);
    EXPECT_EQ(child.dynamic_config.environment, a.dynamic_config.environment);
  }
}

TEST(Crossover, RespectsMaxNpcs) {
  TestCase a = DemoCase(), b = DemoCase();
  for (int i = 0; i < 6; ++i) {
    NpcAgent n;
    n.agent_id = "n" + std::to_string(i);
    n.spawn_pose = {553040.0 + 6 * i, 4181700.0, 0};
    a.dynamic_config.npcs.push_back(n);
    b.dynamic_config.npcs.push_back(n);
  }
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const TestCase c = Crossover(a, b, 4, rng);
    ASSERT_LE(c.dynamic_config.npcs.size(), 4u);
    std::set<std::string> ids;
    for (const NpcAgent& n : c.dynamic_config.npcs) ids.insert(n.agent_id);
    ASSERT_EQ(ids.size(), c.dynamic_config.npcs.size());
  }
}

}  // namespace
}  // namespace scenefuzz
