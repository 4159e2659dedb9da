// Copyright 2026 The Palmland Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "palmland/config.h"
#include "palmland/scenario.h"
#include "palmland/simulation.h"

namespace palmland {

inline constexpr int kProtocolVersion = 1;
inline constexpr double kMaxUserSpeed = 2.0;  // [m/s]

enum class ClientRole { kController, kObserver };

std::string_view to_string(ClientRole role);

// Operator-driven user. Takes over from the scenario script on the first
// user command and keeps the chest yaw and palm bearing at that instant.
struct ManualUser {
  Vec3 chest;
  double chest_yaw = 0.0;
  Vec3 velocity;  // horizontal [m/s]
  double palm_bearing = 0.0;  // world frame
  double palm_distance = 0.0;
  double palm_from = 0.0;
  double ramp_start = 0.0;
  PalmMode palm_mode = PalmMode::kBend;
  double last_t = 0.0;
};

// One message to be sent to one client (or all of them when `client` is
// empty).
struct Outgoing {
  std::optional<std::uint64_t> client;
  std::string text;
};

// Transport-independent live session. Not thread-safe: the server calls it
// from the simulation thread only. Commands are checked on receipt and take
// effect at the next planner tick.
class LiveSession {
 public:
  explicit LiveSession(const RunConfig& cfg);
  LiveSession(const LiveSession&) = delete;
  LiveSession& operator=(const LiveSession&) = delete;

  // Returns the hello message for the new client.
  Outgoing connect(std::uint64_t client);
  void disconnect(std::uint64_t client);
  // Replies with an ack or err for the sender.
  Outgoing handle(std::uint64_t client, const std::string& text);

  // Advances one physics tick.
  void step();
  nlohmann::json state() const;

  std::optional<std::uint64_t> controller() const { return controller_; }
  ClientRole role(std::uint64_t client) const;
  const Simulation& sim() const { return *sim_; }
  const Scenario& scenario() const { return scenario_; }
  bool manual() const { return manual_.has_value(); }

 private:
  UserModel user_at(double t);
  void take_over();
  void apply(const nlohmann::json& cmd);

  RunConfig cfg_;
  Scenario scenario_;
  std::vector<double> takeoffs_;
  std::size_t next_takeoff_ = 0;
  std::optional<ManualUser> manual_;
  std::unique_ptr<Simulation> sim_;
  std::optional<std::uint64_t> controller_;
  std::vector<std::uint64_t> clients_;
};

struct ServeOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8765;  // 0 picks a free port
  double time_scale = 1.0;
  double broadcast_rate = 30.0;  // [Hz]
  std::size_t max_queued = 64;  // per client; slower clients are dropped
  bool handle_signals = false;  // SIGINT/SIGTERM end wait()
};

// Real-time server: `/ws` web socket and GET `/healthz`.
class BridgeServer {
 public:
  BridgeServer(const RunConfig& cfg, const ServeOptions& options);
  ~BridgeServer();
  BridgeServer(const BridgeServer&) = delete;
  BridgeServer& operator=(const BridgeServer&) = delete;

  // Binds and starts the network and simulation threads. Throws Error on
  // bind failure.
  void start();
  void stop();
  // Blocks until stop() is called from another thread, a handled signal
  // arrives or the simulation diverges.
  void wait();
  unsigned short port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace palmland
