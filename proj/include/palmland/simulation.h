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
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "palmland/config.h"
#include "palmland/dynamics.h"
#include "palmland/gesture.h"
#include "palmland/metrics.h"
#include "palmland/planner.h"
#include "palmland/scenario.h"
#include "palmland/world.h"

namespace palmland {

using UserProvider = std::function<UserModel(double t)>;

// Three-rate loop: physics every tick, control every physics/control ratio,
// gesture + planner every planner period. In ideal mode the drone is placed
// on each setpoint and the controller and physics are skipped.
class Simulation {
 public:
  Simulation(const RunConfig& cfg, const Pose& drone_init, UserProvider user);

  // Runs `action` at the start of the next planner tick, before the user is
  // sampled. This is the only way to change state from outside the loop.
  void defer(std::function<void(Simulation&)> action);

  // Advances one physics tick.
  void step();

  // Immediate mutators; call only from inside a deferred action.
  void request_takeoff();
  void reset();
  void force_stay();
  void set_planner_config(const PlannerConfig& cfg);
  void set_gesture_config(const GestureConfig& cfg);

  double time() const;
  std::uint64_t ticks() const { return tick_; }
  double physics_dt() const { return physics_dt_; }
  double planner_dt() const { return cfg_.planner.delta_t; }
  const RunConfig& config() const { return cfg_; }
  const DroneState& drone() const { return drone_; }
  const Setpoint& setpoint() const { return setpoint_; }
  const PlannerStatus& status() const { return planner_.status(); }
  const GestureState& gesture() const { return gesture_; }
  const UserModel& user() const { return user_; }
  MissionPhase phase() const { return planner_.phase(); }
  const RunTrace& trace() const { return trace_; }

 private:
  void planner_tick(double t);
  void control_tick(double t);
  void record(double t, bool planner_tick);

  RunConfig cfg_;
  Pose drone_init_;
  UserProvider user_provider_;
  Planner planner_;
  CascadedController controller_;
  double physics_dt_;
  std::uint64_t physics_per_control_;
  std::uint64_t physics_per_planner_;
  std::uint64_t tick_ = 0;
  DroneState drone_;
  Setpoint setpoint_;
  GestureState gesture_;
  UserModel user_;
  Wrench wrench_;
  Vec3 landed_offset_;
  std::vector<std::function<void(Simulation&)>> deferred_;
  RunTrace trace_;
};

struct RunResult {
  RunTrace trace;
  MetricsReport report;
};

// Headless run of the configured scenario or trace until LANDED or the end
// of the input. Scenario takeoff events fire at the first planner tick at or
// after their time.
RunResult run(const RunConfig& cfg);

// Writes trace.csv and report.json into `dir`, creating it if needed.
void write_outputs(const RunResult& result, const std::filesystem::path& dir);

// Process exit status for a finished run: 0 clean, 1 safety violations.
int exit_status(const MetricsReport& report);

}  // namespace palmland
