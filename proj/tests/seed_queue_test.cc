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


#include "scenefuzz/seed_queue.h"

#include <algorithm>
#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

#include "scenefuzz/rng.h"

namespace scenefuzz {
namespace {

TestCase Named(const std::string& id) {
  TestCase tc;
  tc.case_id = id;
  return tc;
}

TEST(SeedQueue, HighestPriorityFirstThenFifo) {
  SeedQueue q;
  EXPECT_TRUE(q.Push(Named("a"), 1));
  EXPECT_TRUE(q.Push(Named("b"), 5));
  EXPECT_TRUE(q.Push(Named("c"), 5));
  EXPECT_TRUE(q.Push(Named("d"), 0));
  std::vector<std::string> order;
  while (auto e = q.Pop()) order.push_back(e->test_case.case_id);
  EXPECT_EQ(order, (std::vector<std::string>{"b", "c", "a", "d"}));
  EXPECT_FALSE(q.Pop().has_value());
}

TEST(SeedQueue, RejectsDuplicateIdWhileQueued) {
  SeedQueue q;
  EXPECT_TRUE(q.Push(Named("a"), 1));
  EXPECT_FALSE(q.Push(Named("a"), 9));
  EXPECT_EQ(q.size(), 1u);
  EXPECT_EQ(q.Pop()->priority, 1);
  EXPECT_FALSE(q.Contains("a"));
  EXPECT_TRUE(q.Push(Named("a"), 2));
}

// Random interleavings of pushes and pops against a sort-based oracle.
TEST(SeedQueue, MatchesSortOracle) {
  Rng rng(8);
  for (int seq = 0; seq < 10000; ++seq) {
    SeedQueue q;
    // (priority, insertion index, id) of every case still queued.
    std::vector<std::tuple<int64_t, uint64_t, std::string>> oracle;
    uint64_t inserted = 0;
    const int ops = 1 + static_cast<int>(rng.Below(40));
    for (int op = 0; op < ops; ++op) {
      if (oracle.empty() || rng.Bernoulli(0.6)) {
        const std::string id = "c" + std::to_string(rng.Below(30));
        const int64_t priority = rng.IntIn(0, 5);
        const bool fresh =
            std::none_of(oracle.begin(), oracle.end(),
                         [&](const auto& t) { return std::get<2>(t) == id; });
        ASSERT_EQ(q.Push(Named(id), priority), fresh);
        if (fresh) oracle.emplace_back(priority, inserted++, id);
      } else {
        auto best = std::min_element(
            oracle.begin(), oracle.end(), [](const auto& x, const auto& y) {
              return std::make_pair(-std::get<0>(x), std::get<1>(x)) <
                     std::make_pair(-std::get<0>(y), std::get<1>(y));
            });
        const auto e = q.Pop();
        ASSERT_TRUE(e.has_value());
        ASSERT_EQ(e->test_case.case_id, std::get<2>(*best));
        ASSERT_EQ(e->priority, std::get<0>(*best));
        oracle.erase(best);
      }
      ASSERT_EQ(q.size(), oracle.size());
    }
    // Drain: the remainder comes out fully sorted.
    std::sort(oracle.begin(), oracle.end(), [](const auto& x, const auto& y) {
      return std::make_pair(-std::get<0>(x), std::get<1>(x)) <
             std::make_pair(-std::get<0>(y), std::get<1>(y));
    });
    for (const auto& t : oracle) {
      ASSERT_EQ(q.Pop()->test_case.case_id, std::get<2>(t));
    }
    ASSERT_TRUE(q.empty());
  }
}

}  // namespace
}  // namespace scenefuzz
