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

#include <optional>

#include "palmland/core.h"
#include "palmland/gesture.h"
#include "palmland/world.h"

namespace palmland {

// Where the Weber step starts from each tick. kCommanded integrates the
// planner's own previous goal (the reference runs ahead of a lagging
// airframe); kMeasured restarts from the tracked drone position.
enum class PlannerAnchor { kCommanded, kMeasured };

struct PlannerConfig {
  double r_v = 1.25;          // outer comfort radius [m]
  double r_s = 0.30;          // inner safety radius [m]
  double k_prime = 0.2;       // Weber gain
  double k_prime_boost = 0.5; // gain near the palm
  double boost_radius = 0.3;  // drone-palm distance below which the boost applies [m]
  double delta_t = 0.1;       // planner period [s]
  double v_cruise = 0.8;      // straight-approach speed [m/s]
  double v_max = 1.0;         // global speed ceiling [m/s]
  double land_commit_dist = 0.05;
  double land_commit_speed = 0.10;
  double takeoff_altitude = 1.2;
  double takeoff_speed = 0.5;
  double takeoff_tolerance = 0.05;
  double land_descent = 0.05;        // hover clearance above the palm [m]
  double land_descent_speed = 0.1;   // [m/s]
  bool switch_ramp = false;          // ease speed across STAY/APPROACH switches
  double switch_ramp_duration = 0.5; // [s]
  DistanceMode distance_mode = DistanceMode::kPlanar;
  PlannerAnchor anchor = PlannerAnchor::kCommanded;

  void validate() const;
};

// Domain from drone-chest distance r and palm-chest distance. Throws
// ConfigError unless r_s < arm length < r_v.
Domain classify_domain(double r_chest, double palm_chest,
                       const UserModel& user, const PlannerConfig& cfg);

// v = k' d / dt, capped at v_max.
double weber_speed(double d_palm, double k_prime, const PlannerConfig& cfg);

// Horizontal goal one Weber step from `current` toward `target`; z is kept.
Vec3 weber_goal(const Vec3& current, const Vec3& target, double k_prime,
                const PlannerConfig& cfg);

// Next goal on the arm-length circle around the chest, stepping toward the
// palm bearing along the shorter arc. A drone off the circle first moves
// radially toward it, and the tangential step only spends the remaining
// v_max * dt budget. z is kept.
Vec3 arc_goal(const Vec3& drone, const Vec3& chest, const Vec3& palm,
              double r_p, double k_prime, const PlannerConfig& cfg);

double goal_yaw_toward_chest(const Vec3& drone, const Vec3& chest);

double target_altitude(double palm_z, const UserModel& user);

double effective_k_prime(double d_palm, const PlannerConfig& cfg);

// Mission state machine plus four-domain approach. One instance per drone;
// not safe for concurrent calls.
class Planner {
 public:
  explicit Planner(const PlannerConfig& cfg);

  // GROUNDED -> TAKEOFF. Throws StateMachineError from any other phase.
  void request_takeoff();
  void reset();

  // Must be called once per delta_t with non-decreasing world.t.
  Setpoint step(const WorldState& world, const GestureState& gesture);

  MissionPhase phase() const { return phase_; }
  const PlannerStatus& status() const { return status_; }
  const PlannerConfig& config() const { return cfg_; }

  // Swaps the configuration between ticks. Throws ConfigError if invalid.
  void set_config(const PlannerConfig& cfg);

 private:
  void transition(MissionPhase to);
  Setpoint takeoff_step(const WorldState& world);
  Setpoint flight_step(const WorldState& world, const GestureState& gesture);
  Setpoint landing_step(const WorldState& world, const GestureState& gesture);
  Setpoint idle_setpoint(const WorldState& world) const;
  double ramp_scale(double t, Gesture gesture);

  PlannerConfig cfg_;
  MissionPhase phase_ = MissionPhase::kGrounded;
  PlannerStatus status_;
  Vec3 reference_;
  Setpoint last_;
  std::optional<Setpoint> frozen_;
  std::optional<double> takeoff_z_;
  double landing_z0_ = 0.0;
  double descended_ = 0.0;
  std::optional<Vec3> last_palm_;
  double last_palm_t_ = 0.0;
  Vec3 palm_velocity_;
  std::optional<Gesture> last_gesture_;
  double gesture_switch_t_ = 0.0;
};

}  // namespace palmland
