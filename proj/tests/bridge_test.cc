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


#include "scenefuzz/bridge.h"

#include <deque>
#include <future>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "scenefuzz/sim_kernel.h"
#include "test_util.h"

namespace scenefuzz {
namespace {

using nlohmann::json;
using testing::DemoCase;
using testing::LoadFixture;

// Scripted requests in, replies captured.
class MemoryChannel : public LineChannel {
 public:
  explicit MemoryChannel(std::vector<std::string> input)
      : input_(input.begin(), input.end()) {}
  void WriteLine(std::string_view line) override { output.emplace_back(line); }
  std::optional<std::string> ReadLine() override {
    if (input_.empty()) return std::nullopt;
    std::string line = std::move(input_.front());
    input_.pop_front();
    return line;
  }
  std::vector<json> Events() const {
    std::vector<json> out;
    for (const std::string& l : output) out.push_back(json::parse(l));
    return out;
  }
  std::vector<std::string> output;

 private:
  std::deque<std::string> input_;
};

std::string Load(const TestCase& tc) {
  return json{{"cmd", "load"}, {"case", TestCaseToJson(tc)}}.dump();
}

const char* const kFixtures[] = {"rear_end_by_npc", "cut_in", "ego_rear_ends",
                                 "blocked_ahead", "defect", "one_npc"};

TEST(OutcomeEvents, RoundTrip) {
  KernelSimulator sim;
  for (const char* f : kFixtures) {
    const SimOutcome o = sim.Run(LoadFixture(f));
    const std::vector<json> events = OutcomeEvents(o);
    ASSERT_EQ(events.back()["event"], "done");
    // Collisions follow the sample at their time.
    double last_sample = -1.0;
    for (const json& e : events) {
      if (e["event"] == "sample") last_sample = e["t"].get<double>();
      if (e["event"] == "collision") {
        EXPECT_EQ(e["time"].get<double>(), last_sample);
      }
    }
    EXPECT_EQ(SerializeOutcome(OutcomeFromEvents(events)), SerializeOutcome(o)) << f;
  }
}

TEST(OutcomeEvents, InconsistentStreamRejected) {
  std::vector<json> events =
      OutcomeEvents(KernelSimulator().Run(LoadFixture("cut_in")));
  std::vector<json> no_done(events.begin(), events.end() - 1);
  EXPECT_THROW(OutcomeFromEvents(no_done), ProtocolError);
  std::vector<json> lost_sample = events;
  lost_sample.erase(lost_sample.begin());
  EXPECT_THROW(OutcomeFromEvents(lost_sample), ProtocolError);
}

TEST(ServeBridge, LoadRunQuit) {
  const TestCase tc = LoadFixture("defect");
  KernelSimulator sim;
  MemoryChannel channel(
      {Load(tc), R"({"cmd":"run","horizon":60})", R"({"cmd":"quit"})",
       R"({"cmd":"run"})"});
  ServeBridge(sim, channel);
  const std::vector<json> events = channel.Events();
  ASSERT_GE(events.size(), 3u);
  EXPECT_EQ(events.front(), (json{{"event", "loaded"}, {"caseId", tc.case_id}}));
  EXPECT_EQ(events.back(), (json{{"event", "bye"}}));
  const std::vector<json> run(events.begin() + 1, events.end() - 1);
  EXPECT_EQ(SerializeOutcome(OutcomeFromEvents(run)), SerializeOutcome(sim.Run(tc)));
}

TEST(ServeBridge, ErrorsKeepTheSessionAlive) {
  TestCase bad = DemoCase();
  bad.dynamic_config.environment.fog = 3.0;
  TestCase rejected = DemoCase();
  rejected.static_config.start_pose.heading = 3.14159;
  KernelSimulator sim;
  MemoryChannel channel({
      "not json",
      R"({"cmd":"fly"})",
      R"([1,2])",
      R"({"cmd":"run"})",
      Load(bad),
      R"({"cmd":"load"})",
      Load(DemoCase()),
      R"({"cmd":"run","horizon":-1})",
      Load(rejected),
      R"({"cmd":"run","horizon":5})",
  });
  ServeBridge(sim, channel);  // ends at end of stream
  const std::vector<json> e = channel.Events();
  ASSERT_EQ(e.size(), 10u);
  const auto kind = [&](size_t i) { return e[i].value("kind", std::string()); };
  EXPECT_EQ(kind(0), "protocol");
  EXPECT_EQ(kind(1), "protocol");
  EXPECT_EQ(kind(2), "protocol");
  EXPECT_EQ(kind(3), "protocol");
  EXPECT_EQ(kind(4), "invalid_case");
  EXPECT_EQ(kind(5), "protocol");
  EXPECT_EQ(e[6]["event"], "loaded");
  EXPECT_EQ(kind(7), "protocol");
  EXPECT_EQ(e[8]["event"], "loaded");
  EXPECT_EQ(kind(9), "scenario_rejected");
}

TEST(Bridge, TcpLoopback) {
  KernelSimulator kernel;
  std::promise<int> port;
  std::thread server([&] {
    ServeTcp(kernel, "127.0.0.1", 0, [&](int p) { port.set_value(p); }, 1);
  });
  const int p = port.get_future().get();
  {
    std::unique_ptr<BridgeSimulator> remote = BridgeSimulator::ConnectTcp("127.0.0.1", p);
    for (const char* f : {"defect", "cut_in"}) {
      const TestCase tc = LoadFixture(f);
      EXPECT_EQ(SerializeOutcome(remote->Run(tc)), SerializeOutcome(kernel.Run(tc)));
    }
    TestCase rejected = DemoCase();
    rejected.static_config.start_pose.heading = 3.14159;
    EXPECT_THROW(remote->Run(rejected), ScenarioRejected);
    // Still usable after a rejection.
    EXPECT_EQ(remote->Run(DemoCase(), 5.0).completed, Completion::kTimedOut);
  }
  server.join();
}

TEST(Bridge, ConnectRefused) {
  // Grab a free port, then close it again.
  KernelSimulator kernel;
  std::promise<int> port;
  std::thread server([&] {
    ServeTcp(kernel, "127.0.0.1", 0, [&](int p) { port.set_value(p); }, 1);
  });
  const int p = port.get_future().get();
  BridgeSimulator::ConnectTcp("127.0.0.1", p).reset();
  server.join();
  EXPECT_THROW(BridgeSimulator::ConnectTcp("127.0.0.1", p), SimulatorUnavailable);
}

TEST(Bridge, ChildProcess) {
  auto remote = BridgeSimulator::SpawnChild({SCENEFUZZ_BIN, "serve", "--stdio"});
  KernelSimulator kernel;
  for (const char* f : kFixtures) {
    const TestCase tc = LoadFixture(f);
    EXPECT_EQ(SerializeOutcome(remote->Run(tc)), SerializeOutcome(kernel.Run(tc))) << f;
  }
}

TEST(Bridge, ChildWithFixedPlanner) {
  auto remote = BridgeSimulator::SpawnChild(
      {SCENEFUZZ_BIN, "serve", "--stdio", "--fixed-planner"});
  const SimOutcome o = remote->Run(LoadFixture("defect"));
  EXPECT_FALSE(o.HasCrash());
}

TEST(Bridge, MissingExecutable) {
  EXPECT_THROW(
      {
        auto remote = BridgeSimulator::SpawnChild({"/nonexistent/simulator"});
        remote->Run(DemoCase());
      },
      SimulatorUnavailable);
}

TEST(ParseHostPort, Forms) {
  EXPECT_EQ(ParseHostPort("localhost:9000"), std::make_pair(std::string("localhost"), 9000));
  EXPECT_EQ(ParseHostPort("10.0.0.1:1"), std::make_pair(std::string("10.0.0.1"), 1));
  EXPECT_THROW(ParseHostPort("localhost"), std::invalid_argument);
  EXPECT_THROW(ParseHostPort("h:port"), std::invalid_argument);
  EXPECT_THROW(ParseHostPort("h:70000"), std::invalid_argument);
}

}  // namespace
}  // namespace scenefuzz
