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
#include <optional>
#include <string>

#include "json.hpp"
#include "palmland/dynamics.h"
#include "palmland/gesture.h"
#include "palmland/metrics.h"
#include "palmland/planner.h"

namespace palmland {

enum class TrackingMode { kDynamic, kIdeal };

std::string_view to_string(TrackingMode m);
TrackingMode tracking_mode_from_string(const std::string& s);

struct RunConfig {
  PlannerConfig planner;
  ControllerConfig controller;
  DroneParams drone;
  GestureConfig gesture;
  MetricsOptions metrics;

  // Exactly one of these drives the user.
  std::string scenario;
  std::string trace;

  // Replay inputs carry poses only; body geometry and the drone start come
  // from here.
  UserModel trace_user;
  Pose trace_drone{{2.0, 0.0, 0.0}, Quaternion::from_yaw(kPi)};
  double trace_takeoff_t = 0.0;

  TrackingMode mode = TrackingMode::kDynamic;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<double> duration_override;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::ordered_json run_config_to_json(const RunConfig& cfg);

}  // namespace palmland
