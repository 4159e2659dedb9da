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

#include "palmland/core.h"
#include "palmland/world.h"

namespace palmland {

struct DroneParams {
  double mass = 0.10;                       // [kg]
  Vec3 inertia{1e-4, 1e-4, 2e-4};           // diagonal [kg m^2]
  double max_thrust = 3.0 * 0.10 * kGravity; // [N]
  double max_torque = 0.01;                 // per axis [N m]
  double flap_frequency = 12.0;             // [Hz]
  double flap_ripple = 0.05;                // fraction of thrust
  double drag_coeff = 0.05;                 // linear drag [N s/m]

  void validate() const;
};

struct Wrench {
  Vec3 force;   // body frame [N]
  Vec3 torque;  // body frame [N m]
};

struct PidGains {
  Vec3 kp;
  Vec3 ki;
  Vec3 kd;
  Vec3 integrator_limit{1e9, 1e9, 1e9};
  Vec3 output_limit{1e9, 1e9, 1e9};
};

struct PidState {
  Vec3 integral;
  Vec3 prev_error;
  bool primed = false;
};

// Per-axis PID: rectangle-rule integral clamped to +-integrator_limit,
// first-difference derivative (zero on the first call), output clamped to
// +-output_limit.
Vec3 pid_update(const Vec3& error, PidState& state, const PidGains& gains,
                double dt);

struct ControllerConfig {
  // Position loop: meters of error to commanded acceleration [m/s^2].
  PidGains position{
      .kp = {9.0, 9.0, 10.8},
      .ki = {0.5, 0.5, 1.0},
      .kd = {6.0, 6.0, 7.2},
      .integrator_limit = {0.5, 0.5, 0.5},
      .output_limit = {6.0, 6.0, 8.0},
  };
  // Attitude loop: radians of error to angular acceleration [rad/s^2].
  PidGains attitude{
      .kp = {300.0, 300.0, 60.0},
      .ki = {0.0, 0.0, 0.0},
      .kd = {30.0, 30.0, 12.0},
      .integrator_limit = {0.0, 0.0, 0.0},
      .output_limit = {1e9, 1e9, 1e9},
  };
  double max_tilt = 0.35;       // [rad]
  // A new goal is approached along a straight ramp of this duration rather
  // than as a step; 0 disables. Matches the planner period by default.
  double setpoint_ramp = 0.1;   // [s]
  double control_rate = 100.0;  // [Hz]
  double physics_rate = 500.0;  // [Hz]

  void validate() const;
};

// Position PID -> desired acceleration -> thrust and small-angle tilt, then
// attitude PID -> torque. Holds the integrator state of both loops.
class CascadedController {
 public:
  CascadedController(const ControllerConfig& cfg, const DroneParams& params);

  // One control period. GROUNDED and LANDED setpoints cut thrust.
  Wrench step(const DroneState& state, const Setpoint& setpoint);
  void reset();

 private:
  // Position reference after ramping toward the latest goal.
  Vec3 reference(const Vec3& goal, const Vec3& position, double dt);

  ControllerConfig cfg_;
  DroneParams params_;
  PidState position_;
  PidState attitude_;
  bool has_reference_ = false;
  Vec3 ramp_from_;
  Vec3 ramp_to_;
  double ramp_elapsed_ = 0.0;
};

// One-shot wrench for a fresh controller.
Wrench control_step(const DroneState& state, const Setpoint& setpoint,
                    const ControllerConfig& cfg, const DroneParams& params);

// Rigid-body update over dt at absolute time t (t drives the flapping
// ripple). Velocity and angular rate take the explicit force; position uses
// the mean of old and new velocity, which is exact under constant force.
// Throws SimulationDiverged on a non-finite result.
DroneState physics_step(const DroneState& state, const Wrench& wrench,
                        const DroneParams& params, double dt, double t);

// Places the drone exactly on the setpoint, level, facing goal_yaw.
DroneState ideal_tracking_step(const DroneState& state,
                               const Setpoint& setpoint, double dt = 0.1);

}  // namespace palmland
