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

#include "palmland/dynamics.h"

#include <algorithm>
#include <cmath>

#include "palmland/error.h"

namespace palmland {

namespace {

double clamp_sym(double v, double limit) { return std::clamp(v, -limit, limit); }

Vec3 clamp_sym(const Vec3& v, const Vec3& limit) {
  return {clamp_sym(v.x, limit.x), clamp_sym(v.y, limit.y),
          clamp_sym(v.z, limit.z)};
}

Vec3 mul(const Vec3& a, const Vec3& b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }

bool positive(const Vec3& v) { return v.x > 0.0 && v.y > 0.0 && v.z > 0.0; }
bool non_negative(const Vec3& v) { return v.x >= 0.0 && v.y >= 0.0 && v.z >= 0.0; }

}  // namespace

void DroneParams::validate() const {
  if (!(mass > 0.0)) throw ConfigError("drone.mass", "must be > 0");
  if (!positive(inertia)) {
    throw ConfigError("drone.inertia", "diagonal must be positive");
  }
  if (!(max_thrust > 0.0)) throw ConfigError("drone.max_thrust", "must be > 0");
  if (!(max_torque > 0.0)) throw ConfigError("drone.max_torque", "must be > 0");
  if (!(flap_frequency >= 0.0)) {
    throw ConfigError("drone.flap_frequency", "must be >= 0");
  }
  if (!(flap_ripple >= 0.0 && flap_ripple < 0.5)) {
    throw ConfigError("drone.flap_ripple", "must be in [0, 0.5)");
  }
  if (!(drag_coeff >= 0.0)) throw ConfigError("drone.drag_coeff", "must be >= 0");
}

void ControllerConfig::validate() const {
  for (const auto* g : {&position, &attitude}) {
    const char* name = g == &position ? "controller.position" : "controller.attitude";
    if (!non_negative(g->integrator_limit) || !non_negative(g->output_limit)) {
      throw ConfigError(name, "limits must be >= 0");
    }
    if (!g->kp.finite() || !g->ki.finite() || !g->kd.finite()) {
      throw ConfigError(name, "gains must be finite");
    }
  }
  if (!(setpoint_ramp >= 0.0)) {
    throw ConfigError("controller.setpoint_ramp", "must be >= 0");
  }
  if (!(max_tilt > 0.0 && max_tilt < 1.2)) {
    throw ConfigError("controller.max_tilt", "must be in (0, 1.2) rad");
  }
  if (!(control_rate > 0.0)) {
    throw ConfigError("controller.control_rate", "must be > 0");
  }
  if (!(physics_rate >= control_rate)) {
    throw ConfigError("controller.physics_rate", "must be >= control_rate");
  }
}

Vec3 pid_update(const Vec3& error, PidState& state, const PidGains& gains,
                double dt) {
  state.integral = clamp_sym(state.integral + error * dt, gains.integrator_limit);
  Vec3 derivative;
  if (state.primed) derivative = (error - state.prev_error) / dt;
  state.prev_error = error;
  state.primed = true;
  const Vec3 out = mul(gains.kp, error) + mul(gains.ki, state.integral) +
                   mul(gains.kd, derivative);
  return clamp_sym(out, gains.output_limit);
}

CascadedController::CascadedController(const ControllerConfig& cfg,
                                       const DroneParams& params)
    : cfg_(cfg), params_(params) {
  cfg_.validate();
  params_.validate();
}

void CascadedController::reset() {
  position_ = {};
  attitude_ = {};
  has_reference_ = false;
  ramp_elapsed_ = 0.0;
}

Vec3 CascadedController::reference(const Vec3& goal, const Vec3& position,
                                   double dt) {
  if (!has_reference_) {
    ramp_from_ = position;
    ramp_to_ = position;
    ramp_elapsed_ = cfg_.setpoint_ramp;
    has_reference_ = true;
  }
  if (goal != ramp_to_) {
    const double f = cfg_.setpoint_ramp > 0.0
                         ? std::min(1.0, ramp_elapsed_ / cfg_.setpoint_ramp)
                         : 1.0;
    ramp_from_ = ramp_from_ + (ramp_to_ - ramp_from_) * f;
    ramp_to_ = goal;
    ramp_elapsed_ = 0.0;
  }
  ramp_elapsed_ += dt;
  if (cfg_.setpoint_ramp <= 0.0 || ramp_elapsed_ >= cfg_.setpoint_ramp) return ramp_to_;
  return ramp_from_ + (ramp_to_ - ramp_from_) * (ramp_elapsed_ / cfg_.setpoint_ramp);
}

Wrench CascadedController::step(const DroneState& state,
                                const Setpoint& setpoint) {
  if (setpoint.phase == MissionPhase::kGrounded ||
      setpoint.phase == MissionPhase::kLanded) {
    reset();
    return {};
  }
  const double dt = 1.0 / cfg_.control_rate;

  const Vec3 ref = reference(setpoint.goal_position, state.position, dt);
  Vec3 accel = pid_update(ref - state.position, position_, cfg_.position, dt);
  const double a_h_max = kGravity * std::tan(cfg_.max_tilt);
  const double a_h = std::hypot(accel.x, accel.y);
  if (a_h > a_h_max) {
    accel.x *= a_h_max / a_h;
    accel.y *= a_h_max / a_h;
  }

  const Euler att = to_euler(state.orientation);
  const double c = std::cos(att.yaw), s = std::sin(att.yaw);
  const double pitch_d =
      clamp_sym((accel.x * c + accel.y * s) / kGravity, cfg_.max_tilt);
  const double roll_d =
      clamp_sym((accel.x * s - accel.y * c) / kGravity, cfg_.max_tilt);

  const double tilt = std::max(0.5, std::cos(att.roll) * std::cos(att.pitch));
  const double thrust = std::clamp(
      params_.mass * (kGravity + accel.z) / tilt, 0.0, params_.max_thrust);

  const Vec3 att_error{roll_d - att.roll, pitch_d - att.pitch,
                       wrap_angle(setpoint.goal_yaw - att.yaw)};
  const Vec3 alpha = pid_update(att_error, attitude_, cfg_.attitude, dt);
  const Vec3& w = state.angular_velocity;
  const Vec3 torque = mul(params_.inertia, alpha) + w.cross(mul(params_.inertia, w));

  Wrench out;
  out.force = {0.0, 0.0, thrust};
  const double tm = params_.max_torque;
  out.torque = clamp_sym(torque, {tm, tm, tm});
  return out;
}

Wrench control_step(const DroneState& state, const Setpoint& setpoint,
                    const ControllerConfig& cfg, const DroneParams& params) {
  CascadedController controller(cfg, params);
  return controller.step(state, setpoint);
}

DroneState physics_step(const DroneState& state, const Wrench& wrench,
                        const DroneParams& params, double dt, double t) {
  const Vec3 thrust_accel = state.orientation.rotate(wrench.force) / params.mass;
  const double ripple =
      params.flap_ripple * std::sin(2.0 * kPi * params.flap_frequency * t);
  const Vec3 accel = Vec3{0.0, 0.0, -kGravity} + thrust_accel * (1.0 + ripple) -
                     state.velocity * (params.drag_coeff / params.mass);

  DroneState next = state;
  next.velocity = state.velocity + accel * dt;
  next.position = state.position + (state.velocity + next.velocity) * (0.5 * dt);

  const Vec3& w = state.angular_velocity;
  const Vec3 iw = mul(params.inertia, w);
  const Vec3 net = wrench.torque - w.cross(iw);
  next.angular_velocity =
      w + Vec3{net.x / params.inertia.x, net.y / params.inertia.y,
               net.z / params.inertia.z} * dt;

  const Vec3& wn = next.angular_velocity;
  const double rate = wn.norm();
  if (rate > 0.0) {
    next.orientation =
        (state.orientation * Quaternion::from_axis_angle(wn, rate * dt))
            .normalized();
  }

  if (!next.finite()) throw SimulationDiverged("drone state became non-finite");
  return next;
}

DroneState ideal_tracking_step(const DroneState& state,
                               const Setpoint& setpoint, double dt) {
  DroneState next;
  next.position = setpoint.goal_position;
  next.velocity = (setpoint.goal_position - state.position) / dt;
  next.orientation = Quaternion::from_yaw(setpoint.goal_yaw);
  next.angular_velocity = {};
  return next;
}

}  // namespace palmland
