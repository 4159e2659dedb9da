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

#include <array>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "palmland/core.h"
#include "palmland/gesture.h"
#include "palmland/planner.h"
#include "palmland/world.h"

namespace palmland {

// One control-rate sample of a run.
struct TraceSample {
  double t = 0.0;
  Vec3 position;  // drone
  Vec3 target;    // setpoint goal
  double yaw = 0.0;
  double goal_yaw = 0.0;
  Vec3 chest;
  Vec3 palm;
  MissionPhase phase = MissionPhase::kGrounded;
  Domain domain = Domain::kFar;
  Gesture gesture = Gesture::kStay;
  double cmd_speed = 0.0;

  // Planner internals at the tick that produced `target`. Not part of the
  // CSV; NaN after a round trip through a file.
  double d_palm = std::numeric_limits<double>::quiet_NaN();
  double r_chest = std::numeric_limits<double>::quiet_NaN();
  double k_prime = std::numeric_limits<double>::quiet_NaN();
  bool planner_tick = false;
};

struct RunTrace {
  std::vector<TraceSample> samples;
  double dt = 0.01;
};

inline constexpr std::string_view kRunTraceHeader =
    "t,x,y,z,tx,ty,tz,yaw,goal_yaw,chest_x,chest_y,chest_z,palm_x,palm_y,"
    "palm_z,phase,domain,gesture,cmd_speed";

void write_run_trace(std::ostream& out, const RunTrace& trace);
RunTrace parse_run_trace(std::istream& in);
RunTrace load_run_trace(const std::filesystem::path& path);

// sqrt(mean |a_i - t_i|^2). Throws InvalidInput on length mismatch or empty.
double rmse(std::span<const Vec3> actual, std::span<const Vec3> target);

// Lag (>= 0) at which `actual` best matches `target` delayed, by normalized
// cross-correlation over lags 0..max_lag/dt. Ties go to the smaller lag.
// Throws InvalidInput when the series are too short for max_lag and
// UndefinedDelay when either has zero variance.
double estimate_delay(std::span<const double> actual,
                      std::span<const double> target, double dt, double max_lag);
double estimate_delay(std::span<const Vec3> actual, std::span<const Vec3> target,
                      double dt, double max_lag);

struct SafetyAudit {
  double min_chest_drone = std::numeric_limits<double>::infinity();
  double min_setpoint_chest = std::numeric_limits<double>::infinity();
  int setpoint_violations = 0;
  double max_palm_increase = 0.0;
  bool smooth = true;
};

inline constexpr double kSmoothStepLimit = 0.02;  // [m] per sample

SafetyAudit safety_audit(const RunTrace& trace, const PlannerConfig& cfg);

struct LandingReport {
  bool success = false;
  std::optional<double> time;
  std::optional<double> touchdown_speed;
};

// Reference figures from the hardware study, reported for comparison only.
struct HardwareReference {
  double rmse = 0.1695;
  double delay = 1.0;
  double min_chest_drone = 0.693;
};

struct MetricsOptions {
  double max_lag = 3.0;          // delay search window [s]
  double settle_window = 1.5;    // STAY time excluded from hold drift [s]
  double planner_period = 0.1;   // speed differencing window [s]
};

struct MetricsReport {
  std::string scenario;
  std::string mode;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  double dt = 0.0;
  double duration = 0.0;

  double rmse = 0.0;
  std::optional<double> delay;
  SafetyAudit safety;
  double max_commanded_speed = 0.0;
  double max_actual_speed = 0.0;
  double d1_speed_std = 0.0;
  int gesture_transitions = 0;
  double overshoot = 0.0;
  std::vector<double> overshoots;
  double hold_drift = 0.0;
  LandingReport landing;
  std::array<double, 4> dwell{};  // indexed by Domain
  std::optional<double> approach_bearing_deg;
  HardwareReference reference;
};

MetricsReport compute_report(const RunTrace& trace, const PlannerConfig& cfg,
                             const MetricsOptions& options = {});

nlohmann::ordered_json report_to_json(const MetricsReport& report);

}  // namespace palmland
