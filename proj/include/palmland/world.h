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

#include <string_view>

#include "palmland/core.h"
#include "palmland/gesture.h"

namespace palmland {

struct DroneState {
  Vec3 position;
  Vec3 velocity;
  Quaternion orientation;
  Vec3 angular_velocity;  // body frame [rad/s]

  bool finite() const {
    return position.finite() && velocity.finite() && orientation.finite() &&
           angular_velocity.finite();
  }
};

enum class MissionPhase { kGrounded, kTakeoff, kFlight, kLanding, kLanded };

enum class Domain { kFar, kWeber, kArc, kHold };

std::string_view to_string(MissionPhase p);
std::string_view to_string(Domain d);
MissionPhase phase_from_string(std::string_view s);
Domain domain_from_string(std::string_view s);

// Goal pose commanded to the flight controller for one planner tick.
struct Setpoint {
  Vec3 goal_position;
  double goal_yaw = 0.0;
  double commanded_speed = 0.0;
  Domain source_domain = Domain::kFar;
  MissionPhase phase = MissionPhase::kGrounded;

  bool operator==(const Setpoint&) const = default;
};

struct PlannerStatus {
  MissionPhase phase = MissionPhase::kGrounded;
  GestureState gesture;
  Domain domain = Domain::kFar;
  double d_palm = 0.0;   // planner reference to palm
  double r_chest = 0.0;  // planner reference to chest
  double k_prime = 0.0;  // Weber gain in effect this tick
};

struct WorldState {
  double t = 0.0;
  UserModel user;
  DroneState drone;
  PlannerStatus planner;
  Setpoint setpoint;
};

}  // namespace palmland
