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

#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <chrono>
#include <cstring>

#include "scenefuzz/scenario.h"

namespace scenefuzz {

using nlohmann::json;

namespace {

std::string Errno(const std::string& what) {
  return what + ": " + std::strerror(errno);
}

json ErrorEvent(std::string_view kind, std::string_view message) {
  return {{"event", "error"}, {"kind", kind}, {"message", message}};
}

}  // namespace

FdChannel::FdChannel(int read_fd, int write_fd)
    : read_fd_(read_fd), write_fd_(write_fd) {}

FdChannel::~FdChannel() {
  CloseWrite();
  if (read_fd_ >= 0) ::close(read_fd_);
}

void FdChannel::CloseWrite() {
  if (write_fd_ >= 0) ::close(write_fd_);
  write_fd_ = -1;
}

void FdChannel::WriteLine(std::string_view line) {
  if (write_fd_ < 0) throw SimulatorUnavailable("channel is closed");
  std::string data(line);
  data += '\n';
  size_t done = 0;
  while (done < data.size()) {
    // MSG_NOSIGNAL keeps a vanished socket peer from raising SIGPIPE; pipes
    // fall back to write().
    ssize_t n = ::send(write_fd_, data.data() + done, data.size() - done,
                       MSG_NOSIGNAL);
    if (n < 0 && errno == ENOTSOCK) {
      n = ::write(write_fd_, data.data() + done, data.size() - done);
    }
    if (n < 0) {
      if (errno == EINTR) continue;
      throw SimulatorUnavailable(Errno("bridge write failed"));
    }
    done += static_cast<size_t>(n);
  }
}

std::optional<std::string> FdChannel::ReadLine() {
  while (true) {
    const size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    if (read_fd_ < 0) return std::nullopt;
    char chunk[65536];
    const ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw SimulatorUnavailable(Errno("bridge read failed"));
    }
    if (n == 0) {
      // A final unterminated line still counts.
      if (buffer_.empty()) return std::nullopt;
      std::string line = std::move(buffer_);
      buffer_.clear();
      ::close(read_fd_);
      read_fd_ = -1;
      return line;
    }
    buffer_.append(chunk, static_cast<size_t>(n));
  }
}

std::vector<json> OutcomeEvents(const SimOutcome& o) {
  std::vector<json> events;
  size_t next_crash = 0;
  auto emit_crash = [&](const CrashEvent& c) {
    events.push_back({{"event", "collision"},
                      {"agent1", c.party_a},
                      {"agent2", c.party_b},
                      {"contact",
                       {{"easting", c.contact_point.easting},
                        {"northing", c.contact_point.northing}}},
                      {"time", c.time},
                      {"relativeSpeedKmh", c.relative_speed_kmh}});
  };
  for (const TrajectorySample& s : o.trajectory.samples) {
    events.push_back({{"event", "sample"},
                      {"t", s.time},
                      {"easting", s.easting},
                      {"northing", s.northing},
                      {"heading", s.heading},
                      {"speed", s.speed}});
    while (next_crash < o.crashes.size() &&
           o.crashes[next_crash].time <= s.time) {
      emit_crash(o.crashes[next_crash++]);
    }
  }
  while (next_crash < o.crashes.size()) emit_crash(o.crashes[next_crash++]);

  json summary = OutcomeToJson(o);
  summary.erase("trajectory");
  summary.erase("crashes");
  summary["samples"] = o.trajectory.samples.size();
  summary["collisions"] = o.crashes.size();
  events.push_back({{"event", "done"}, {"outcome", std::move(summary)}});
  return events;
}

SimOutcome OutcomeFromEvents(const std::vector<json>& events) {
  json trajectory = json::array();
  json crashes = json::array();
  const json* done = nullptr;
  try {
    for (const json& e : events) {
      const std::string kind = e.at("event").get<std::string>();
      if (done != nullptr) throw ProtocolError("event after done");
      if (kind == "sample") {
        trajectory.push_back({e.at("t"), e.at("easting"), e.at("northing"),
                              e.at("heading"), e.at("speed")});
      } else if (kind == "collision") {
        crashes.push_back({{"time", e.at("time")},
                           {"partyA", e.at("agent1")},
                           {"partyB", e.at("agent2")},
                           {"contact", e.at("contact")},
                           {"relativeSpeedKmh", e.at("relativeSpeedKmh")}});
      } else if (kind == "done") {
        done = &e;
      } else {
        throw ProtocolError("unexpected event '" + kind + "' during a run");
      }
    }
    if (done == nullptr) throw ProtocolError("run ended without done");
    json full = done->at("outcome");
    if (!full.is_object()) throw ProtocolError("done.outcome must be an object");
    if (full.at("samples").get<size_t>() != trajectory.size() ||
        full.at("collisions").get<size_t>() != crashes.size()) {
      throw ProtocolError("done counts disagree with the events received");
    }
    full.erase("samples");
    full.erase("collisions");
    full["trajectory"] = std::move(trajectory);
    full["crashes"] = std::move(crashes);
    return OutcomeFromJson(full);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed event: ") + e.what());
  }
}

void ServeBridge(Simulator& simulator, LineChannel& channel) {
  std::optional<TestCase> loaded;
  while (std::optional<std::string> line = channel.ReadLine()) {
    if (line->empty()) continue;
    json request;
    try {
      request = json::parse(*line);
    } catch (const json::exception& e) {
      channel.WriteLine(ErrorEvent("protocol", e.what()).dump());
      continue;
    }
    const auto cmd = request.is_object() ? request.find("cmd") : request.end();
    if (!request.is_object() || cmd == request.end() || !cmd->is_string()) {
      channel.WriteLine(
          ErrorEvent("protocol", "request needs a string 'cmd'").dump());
      continue;
    }
    const std::string name = cmd->get<std::string>();
    if (name == "quit") {
      channel.WriteLine(json{{"event", "bye"}}.dump());
      return;
    }
    if (name == "load") {
      loaded.reset();
      const auto c = request.find("case");
      if (c == request.end()) {
        channel.WriteLine(ErrorEvent("protocol", "load needs 'case'").dump());
        continue;
      }
      try {
        TestCase tc = TestCaseFromJson(*c);
        const ValidationReport report = Validate(tc);
        if (!report.ok()) {
          const Violation& v = report.violations.front();
          throw ScenarioError(v.rule + ": " + v.message, v.path);
        }
        channel.WriteLine(
            json{{"event", "loaded"}, {"caseId", tc.case_id}}.dump());
        loaded = std::move(tc);
      } catch (const ScenarioError& e) {
        std::string message = e.what();
        if (!e.path().empty()) message = e.path() + ": " + message;
        channel.WriteLine(ErrorEvent("invalid_case", message).dump());
      }
      continue;
    }
    if (name == "run") {
      double horizon = kDefaultHorizon;
      if (auto h = request.find("horizon"); h != request.end()) {
        if (!h->is_number() || !(h->get<double>() > 0.0)) {
          channel.WriteLine(
              ErrorEvent("protocol", "horizon must be a positive number")
                  .dump());
          continue;
        }
        horizon = h->get<double>();
      }
      if (!loaded) {
        channel.WriteLine(ErrorEvent("protocol", "run before load").dump());
        continue;
      }
      std::vector<json> events;
      try {
        events = OutcomeEvents(simulator.Run(*loaded, horizon));
      } catch (const ScenarioRejected& e) {
        channel.WriteLine(ErrorEvent("scenario_rejected", e.what()).dump());
        continue;
      } catch (const std::exception& e) {
        channel.WriteLine(ErrorEvent("simulator", e.what()).dump());
        continue;
      }
      for (const json& e : events) channel.WriteLine(e.dump());
      continue;
    }
    channel.WriteLine(ErrorEvent("protocol", "unknown cmd '" + name + "'").dump());
  }
}

void ServeTcp(Simulator& simulator, const std::string& host, int port,
              const std::function<void(int)>& on_listening,
              int max_connections) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* found = nullptr;
  const std::string service = std::to_string(port);
  if (int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(),
                             service.c_str(), &hints, &found);
      rc != 0) {
    throw SimulatorUnavailable("cannot resolve " + host + ": " +
                               ::gai_strerror(rc));
  }
  int listener = -1;
  for (addrinfo* a = found; a != nullptr && listener < 0; a = a->ai_next) {
    listener = ::socket(a->ai_family, a->ai_socktype | SOCK_CLOEXEC,
                        a->ai_protocol);
    if (listener < 0) continue;
    const int one = 1;
    ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(listener, a->ai_addr, a->ai_addrlen) != 0 ||
        ::listen(listener, 4) != 0) {
      ::close(listener);
      listener = -1;
    }
  }
  ::freeaddrinfo(found);
  if (listener < 0) throw SimulatorUnavailable(Errno("cannot listen"));

  sockaddr_storage bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&bound), &len);
  const int bound_port =
      bound.ss_family == AF_INET6
          ? ntohs(reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port)
          : ntohs(reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
  if (on_listening) on_listening(bound_port);

  for (int served = 0; max_connections <= 0 || served < max_connections;
       ++served) {
    const int conn = ::accept4(listener, nullptr, nullptr, SOCK_CLOEXEC);
    if (conn < 0) {
      if (errno == EINTR) continue;
      ::close(listener);
      throw SimulatorUnavailable(Errno("accept failed"));
    }
    FdChannel channel(conn, ::dup(conn));
    try {
      ServeBridge(simulator, channel);
    } catch (const SimulatorUnavailable&) {
      // The client went away mid-session; serve the next one.
    }
  }
  ::close(listener);
}

BridgeSimulator::BridgeSimulator(std::unique_ptr<LineChannel> channel,
                                 int child_pid)
    : channel_(std::move(channel)), child_pid_(child_pid) {}

BridgeSimulator::~BridgeSimulator() {
  // Wait for the goodbye so the server never writes into a closed stream.
  try {
    channel_->WriteLine(json{{"cmd", "quit"}}.dump());
    while (std::optional<std::string> line = channel_->ReadLine()) {
      if (line->find("\"bye\"") != std::string::npos) break;
    }
  } catch (const std::exception&) {
  }
  channel_.reset();
  if (child_pid_ > 0) {
    int status = 0;
    while (::waitpid(child_pid_, &status, 0) < 0 && errno == EINTR) {
    }
  }
}

std::unique_ptr<BridgeSimulator> BridgeSimulator::SpawnChild(
    const std::vector<std::string>& argv) {
  if (argv.empty()) throw SimulatorUnavailable("empty bridge command");
  int to_child[2], from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0) {
    throw SimulatorUnavailable(Errno("pipe failed"));
  }
  if (::pipe2(from_child, O_CLOEXEC) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw SimulatorUnavailable(Errno("pipe failed"));
  }
  // A child that dies must surface as a write error, not kill us.
  ::signal(SIGPIPE, SIG_IGN);
  std::vector<char*> args;
  for (const std::string& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) {
      ::close(fd);
    }
    throw SimulatorUnavailable(Errno("fork failed"));
  }
  if (pid == 0) {
    ::signal(SIGPIPE, SIG_DFL);
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  return std::make_unique<BridgeSimulator>(
      std::make_unique<FdChannel>(from_child[0], to_child[1]), pid);
}

std::unique_ptr<BridgeSimulator> BridgeSimulator::ConnectTcp(
    const std::string& host, int port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const std::string service = std::to_string(port);
  if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &found);
      rc != 0) {
    throw SimulatorUnavailable("cannot resolve " + host + ": " +
                               ::gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* a = found; a != nullptr && fd < 0; a = a->ai_next) {
    fd = ::socket(a->ai_family, a->ai_socktype | SOCK_CLOEXEC, a->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, a->ai_addr, a->ai_addrlen) != 0) {
      ::close(fd);
      fd = -1;
    }
  }
  ::freeaddrinfo(found);
  if (fd < 0) {
    throw SimulatorUnavailable(Errno("cannot connect to " + host + ":" +
                                     service));
  }
  return std::make_unique<BridgeSimulator>(
      std::make_unique<FdChannel>(fd, ::dup(fd)));
}

json BridgeSimulator::Receive() {
  std::optional<std::string> line = channel_->ReadLine();
  if (!line) throw SimulatorUnavailable("bridge peer closed the stream");
  try {
    json event = json::parse(*line);
    if (!event.is_object() || !event.contains("event") ||
        !event["event"].is_string()) {
      throw ProtocolError("bridge message without an 'event' string");
    }
    return event;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed bridge message: ") + e.what());
  }
}

namespace {

[[noreturn]] void RaiseRemote(const json& event) {
  const std::string kind = event.value("kind", "");
  const std::string message = event.value("message", "");
  if (kind == "scenario_rejected" || kind == "invalid_case") {
    throw ScenarioRejected(message);
  }
  if (kind == "protocol") throw ProtocolError("backend: " + message);
  throw SimulatorError("backend " + kind + ": " + message);
}

}  // namespace

SimOutcome BridgeSimulator::Run(const TestCase& test_case, double horizon) {
  const auto start = std::chrono::steady_clock::now();
  channel_->WriteLine(
      json{{"cmd", "load"}, {"case", TestCaseToJson(test_case)}}.dump());
  json reply = Receive();
  if (reply["event"] == "error") RaiseRemote(reply);
  if (reply["event"] != "loaded") {
    throw ProtocolError("expected loaded, got " + reply["event"].dump());
  }
  channel_->WriteLine(json{{"cmd", "run"}, {"horizon", horizon}}.dump());
  std::vector<json> events;
  while (true) {
    json event = Receive();
    if (event["event"] == "error") RaiseRemote(event);
    const bool done = event["event"] == "done";
    events.push_back(std::move(event));
    if (done) break;
  }
  SimOutcome outcome = OutcomeFromEvents(events);
  outcome.wall_time = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return outcome;
}

std::pair<std::string, int> ParseHostPort(std::string_view address) {
  const size_t colon = address.rfind(':');
  if (colon == std::string_view::npos || colon == 0 ||
      colon + 1 == address.size()) {
    throw std::invalid_argument("expected host:port, got '" +
                                std::string(address) + "'");
  }
  std::string_view host = address.substr(0, colon);
  if (host.size() >= 2 && host.front() == '[' && host.back() == ']') {
    host = host.substr(1, host.size() - 2);
  }
  const std::string_view port_text = address.substr(colon + 1);
  int port = 0;
  auto [ptr, ec] = std::from_chars(port_text.data(),
                                   port_text.data() + port_text.size(), port);
  if (ec != std::errc() || ptr != port_text.data() + port_text.size() ||
      port < 1 || port > 65535) {
    throw std::invalid_argument("bad port in '" + std::string(address) + "'");
  }
  return {std::string(host), port};
}

}  // namespace scenefuzz
