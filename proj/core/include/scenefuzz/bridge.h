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

#ifndef SCENEFUZZ_CORE_BRIDGE_H_
#define SCENEFUZZ_CORE_BRIDGE_H_

// Newline-delimited JSON bridge to an external simulator. Wire format in
// docs/bridge_protocol.md. Requests:
//
//   {"cmd":"load","case":<test case>}   -> loaded | error
//   {"cmd":"run","horizon":<seconds>}   -> sample* collision* done | error
//   {"cmd":"quit"}                      -> bye, then the server hangs up
//
// Any reliable ordered byte stream works as transport; this file provides
// child-process standard I/O and TCP.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "scenefuzz/sim_interface.h"

namespace scenefuzz {

// A bidirectional line-oriented stream.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  // Sends `line` plus '\n'. Throws SimulatorUnavailable when the peer is gone.
  virtual void WriteLine(std::string_view line) = 0;
  // Next line without its terminator; nullopt at end of stream.
  virtual std::optional<std::string> ReadLine() = 0;
};

// Channel over a pair of file descriptors (which may be the same socket).
// Owns and closes them.
class FdChannel : public LineChannel {
 public:
  FdChannel(int read_fd, int write_fd);
  ~FdChannel() override;
  FdChannel(const FdChannel&) = delete;
  FdChannel& operator=(const FdChannel&) = delete;

  void WriteLine(std::string_view line) override;
  std::optional<std::string> ReadLine() override;
  void CloseWrite();

 private:
  int read_fd_;
  int write_fd_;
  std::string buffer_;
};

// Encoding of a finished run as the event stream sent for "run": samples in
// time order with each collision after the sample at its time, then done.
std::vector<nlohmann::json> OutcomeEvents(const SimOutcome& outcome);
// Inverse of OutcomeEvents. Throws ProtocolError on an inconsistent stream.
SimOutcome OutcomeFromEvents(const std::vector<nlohmann::json>& events);

// Answers requests from `channel` with `simulator` until quit or end of
// stream. Malformed requests get an error event; the session continues.
void ServeBridge(Simulator& simulator, LineChannel& channel);

// Listens on host:port (port 0 picks a free one), reports the bound port
// through `on_listening`, and serves connections one at a time. Returns after
// `max_connections` connections when it is positive, else never.
void ServeTcp(Simulator& simulator, const std::string& host, int port,
              const std::function<void(int port)>& on_listening,
              int max_connections = 0);

// Simulator backend speaking the protocol to a remote peer. One request at a
// time, so not thread-safe.
class BridgeSimulator : public Simulator {
 public:
  explicit BridgeSimulator(std::unique_ptr<LineChannel> channel,
                           int child_pid = -1);
  ~BridgeSimulator() override;

  // Starts argv[0] with the remaining arguments, talking over its stdin and
  // stdout. Throws SimulatorUnavailable when it cannot be started.
  static std::unique_ptr<BridgeSimulator> SpawnChild(
      const std::vector<std::string>& argv);
  // Throws SimulatorUnavailable when the connection fails.
  static std::unique_ptr<BridgeSimulator> ConnectTcp(const std::string& host,
                                                     int port);

  SimOutcome Run(const TestCase& test_case,
                 double horizon = kDefaultHorizon) override;

 private:
  nlohmann::json Receive();

  std::unique_ptr<LineChannel> channel_;
  int child_pid_;
};

// Splits "host:port". Throws std::invalid_argument on a malformed address.
std::pair<std::string, int> ParseHostPort(std::string_view address);

}  // namespace scenefuzz

#endif  // SCENEFUZZ_CORE_BRIDGE_H_
