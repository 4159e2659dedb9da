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

#include "palmland/planner.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "palmland/error.h"

namespace palmland {

namespace {

Vec3 horizontal(const Vec3& v) { return {v.x, v.y, 0.0}; }

bool legal(MissionPhase from, MissionPhase to) {
  if (to == MissionPhase::kGrounded) return true;
  switch (from) {
    case MissionPhase::kGrounded: return to == MissionPhase::kTakeoff;
    case MissionPhase::kTakeoff: return to == MissionPhase::kFlight;
    case MissionPhase::kFlight: return to == MissionPhase::kLanding;
    case MissionPhase::kLanding: return to == MissionPhase::kLanded;
    case MissionPhase::kLanded: return false;
  }
  return false;
}

}  // namespace

std::string_view to_string(MissionPhase p) {
  switch (p) {
    case MissionPhase::kGrounded: return "GROUNDED";
    case MissionPhase::kTakeoff: return "TAKEOFF";
    case MissionPhase::kFlight: return "FLIGHT";
    case MissionPhase::kLanding: return "LANDING";
    case MissionPhase::kLanded: return "LANDED";
  }
  return "?";
}

std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::kFar: return "D1_FAR";
    case Domain::kWeber: return "D2_WEBER";
    case Domain::kArc: return "D3_ARC";
    case Domain::kHold: return "D4_HOLD";
  }
  return "?";
}

MissionPhase phase_from_string(std::string_view s) {
  for (auto p : {MissionPhase::kGrounded, MissionPhase::kTakeoff,
                 MissionPhase::kFlight, MissionPhase::kLanding,
                 MissionPhase::kLanded}) {
    if (to_string(p) == s) return p;
  }
  throw InvalidInput("unknown mission phase '" + std::string(s) + "'");
}

Domain domain_from_string(std::string_view s) {
  for (auto d : {Domain::kFar, Domain::kWeber, Domain::kArc, Domain::kHold}) {
    if (to_string(d) == s) return d;
  }
  throw InvalidInput("unknown domain '" + std::string(s) + "'");
}

void PlannerConfig::validate() const {
  if (!(r_s > 0.0 && r_s < r_v)) {
    throw ConfigError("planner.r_s", "must satisfy 0 < r_s < r_v");
  }
  if (!(k_prime > 0.0 && k_prime <= 0.33)) {
    throw ConfigError("planner.k_prime", "must be in (0, 0.33]");
  }
  // A gain of 1 or more would step past the palm.
  if (!(k_prime_boost > 0.0 && k_prime_boost < 1.0)) {
    throw ConfigError("planner.k_prime_boost", "must be in (0, 1)");
  }
  if (!(boost_radius >= 0.0)) {
    throw ConfigError("planner.boost_radius", "must be >= 0");
  }
  if (!(delta_t > 0.0)) throw ConfigError("planner.delta_t", "must be > 0");
  if (!(v_max > 0.0)) throw ConfigError("planner.v_max", "must be > 0");
  if (!(v_cruise > 0.0 && v_cruise <= v_max)) {
    throw ConfigError("planner.v_cruise", "must satisfy 0 < v_cruise <= v_max");
  }
  if (!(land_commit_dist > 0.0)) {
    throw ConfigError("planner.land_commit_dist", "must be > 0");
  }
  if (!(land_commit_speed > 0.0)) {
    throw ConfigError("planner.land_commit_speed", "must be > 0");
  }
  if (!(takeoff_altitude > 0.0)) {
    throw ConfigError("planner.takeoff_altitude", "must be > 0");
  }
  if (!(takeoff_speed > 0.0 && takeoff_speed <= v_max)) {
    throw ConfigError("planner.takeoff_speed", "must be in (0, v_max]");
  }
  if (!(takeoff_tolerance > 0.0)) {
    throw ConfigError("planner.takeoff_tolerance", "must be > 0");
  }
  if (!(land_descent >= 0.0)) {
    throw ConfigError("planner.land_descent", "must be >= 0");
  }
  if (!(land_descent_speed > 0.0 && land_descent_speed <= v_max)) {
    throw ConfigError("planner.land_descent_speed", "must be in (0, v_max]");
  }
  if (!(switch_ramp_duration > 0.0)) {
    throw ConfigError("planner.switch_ramp_duration", "must be > 0");
  }
}

Domain classify_domain(double r_chest, double palm_chest,
                       const UserModel& user, const PlannerConfig& cfg) {
  const double r_p = user.arm_length;
  if (!(r_p > cfg.r_s && r_p < cfg.r_v)) {
    throw ConfigError("user.arm_length", "must lie strictly between r_s and r_v");
  }
  if (palm_chest <= cfg.r_s) return Domain::kHold;
  if (r_chest > cfg.r_v) return Domain::kFar;
  if (r_chest > r_p) return Domain::kWeber;
  // Includes r <= r_s: arc_goal pushes the drone back out to the circle.
  return Domain::kArc;
}

double weber_speed(double d_palm, double k_prime, const PlannerConfig& cfg) {
  return std::min(k_prime * d_palm / cfg.delta_t, cfg.v_max);
}

Vec3 weber_goal(const Vec3& current, const Vec3& target, double k_prime,
                const PlannerConfig& cfg) {
  const double d = horizontal_distance(current, target);
  if (d == 0.0) return current;
  const double step = std::min(k_prime * d, cfg.v_max * cfg.delta_t);
  const Vec3 dir = horizontal(target - current) / d;
  return current + dir * step;
}

Vec3 arc_goal(const Vec3& drone, const Vec3& chest, const Vec3& palm,
              double r_p, double k_prime, const PlannerConfig& cfg) {
  const Vec3 rel = horizontal(drone - chest);
  const double r = std::hypot(rel.x, rel.y);
  if (r < 1e-12) {
    throw DegenerateGeometry("drone coincides with the chest in the xy plane");
  }
  const double budget = cfg.v_max * cfg.delta_t;
  const double theta_d = std::atan2(rel.y, rel.x);

  const double radial = r_p - r;
  if (std::abs(radial) >= budget) {
    const double r_new = r + std::copysign(budget, radial);
    return {chest.x + r_new * std::cos(theta_d),
            chest.y + r_new * std::sin(theta_d), drone.z};
  }

  double theta = theta_d;
  const Vec3 prel = horizontal(palm - chest);
  if (std::hypot(prel.x, prel.y) > 0.0) {
    const double gap = wrap_angle(std::atan2(prel.y, prel.x) - theta_d);
    const double arc = r_p * std::abs(gap);
    const double step = std::min(k_prime * arc, budget - std::abs(radial));
    if (gap != 0.0) theta += std::copysign(step / r_p, gap);
  }
  return {chest.x + r_p * std::cos(theta), chest.y + r_p * std::sin(theta),
          drone.z};
}

double goal_yaw_toward_chest(const Vec3& drone, const Vec3& chest) {
  const double dx = chest.x - drone.x;
  const double dy = chest.y - drone.y;
  if (dx == 0.0 && dy == 0.0) {
    throw DegenerateGeometry("drone coincides with the chest in the xy plane");
  }
  return std::atan2(dy, dx);
}

double target_altitude(double palm_z, const UserModel& user) {
  return std::clamp(palm_z, user.elbow_height, user.eye_height);
}

double effective_k_prime(double d_palm, const PlannerConfig& cfg) {
  return d_palm < cfg.boost_radius ? cfg.k_prime_boost : cfg.k_prime;
}

Planner::Planner(const PlannerConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

void Planner::set_config(const PlannerConfig& cfg) {
  cfg.validate();
  cfg_ = cfg;
}

void Planner::transition(MissionPhase to) {
  if (!legal(phase_, to)) {
    throw StateMachineError("illegal transition " +
                            std::string(to_string(phase_)) + " -> " +
                            std::string(to_string(to)));
  }
  phase_ = to;
  status_.phase = to;
}

void Planner::request_takeoff() {
  transition(MissionPhase::kTakeoff);
  takeoff_z_.reset();
}

void Planner::reset() {
  const PlannerConfig cfg = cfg_;
  *this = Planner(cfg);
}

Setpoint Planner::idle_setpoint(const WorldState& world) const {
  Setpoint sp;
  sp.goal_position = world.drone.position;
  sp.goal_yaw = quaternion_yaw(world.drone.orientation.normalized());
  sp.commanded_speed = 0.0;
  sp.source_domain = status_.domain;
  sp.phase = phase_;
  return sp;
}

Setpoint Planner::step(const WorldState& world, const GestureState& gesture) {
  const Vec3& palm = world.user.palm.position;
  if (last_palm_ && world.t > last_palm_t_) {
    palm_velocity_ = (palm - *last_palm_) / (world.t - last_palm_t_);
  } else {
    palm_velocity_ = {};
  }
  last_palm_ = palm;
  last_palm_t_ = world.t;
  status_.gesture = gesture;

  Setpoint sp;
  switch (phase_) {
    case MissionPhase::kGrounded:
    case MissionPhase::kLanded:
      reference_ = world.drone.position;
      sp = idle_setpoint(world);
      break;
    case MissionPhase::kTakeoff:
      sp = takeoff_step(world);
      break;
    case MissionPhase::kFlight:
      sp = flight_step(world, gesture);
      break;
    case MissionPhase::kLanding:
      sp = landing_step(world, gesture);
      break;
  }
  status_.phase = phase_;
  last_ = sp;
  return sp;
}

Setpoint Planner::takeoff_step(const WorldState& world) {
  if (!takeoff_z_) {
    takeoff_z_ = target_altitude(cfg_.takeoff_altitude, world.user);
    reference_ = world.drone.position;
  }
  const bool at_altitude = reference_.z == *takeoff_z_ &&
                           std::abs(world.drone.position.z - *takeoff_z_) <
                               cfg_.takeoff_tolerance;
  if (at_altitude) {
    transition(MissionPhase::kFlight);
    return flight_step(world, status_.gesture);
  }

  Setpoint sp;
  const double dz = std::clamp(*takeoff_z_ - reference_.z,
                               -cfg_.takeoff_speed * cfg_.delta_t,
                               cfg_.takeoff_speed * cfg_.delta_t);
  sp.goal_position = {reference_.x, reference_.y, reference_.z + dz};
  // Land exactly on the target so the FLIGHT check above can use equality.
  if (std::abs(*takeoff_z_ - sp.goal_position.z) < 1e-12) {
    sp.goal_position.z = *takeoff_z_;
  }
  const Vec3& chest = world.user.chest.position;
  sp.goal_yaw = horizontal_distance(sp.goal_position, chest) > 0.0
                    ? goal_yaw_toward_chest(sp.goal_position, chest)
                    : quaternion_yaw(world.drone.orientation.normalized());
  sp.commanded_speed = std::abs(dz) / cfg_.delta_t;
  sp.source_domain = status_.domain;
  sp.phase = MissionPhase::kTakeoff;
  reference_ = sp.goal_position;
  return sp;
}

double Planner::ramp_scale(double t, Gesture gesture) {
  if (last_gesture_ != gesture) {
    // The first FLIGHT tick counts as a switch only for the ramp-up.
    gesture_switch_t_ = t;
    if (!last_gesture_ && gesture == Gesture::kStay) {
      gesture_switch_t_ = t - cfg_.switch_ramp_duration;
    }
    last_gesture_ = gesture;
  }
  if (!cfg_.switch_ramp) return gesture == Gesture::kStay ? 0.0 : 1.0;
  const double progress =
      (t - gesture_switch_t_ + cfg_.delta_t) / cfg_.switch_ramp_duration;
  return gesture == Gesture::kApproach ? std::min(1.0, progress)
                                       : std::max(0.0, 1.0 - progress);
}

Setpoint Planner::flight_step(const WorldState& world,
                              const GestureState& gesture) {
  const UserModel& user = world.user;
  const Vec3& chest = user.chest.position;
  const Vec3& palm = user.palm.position;
  if (cfg_.anchor == PlannerAnchor::kMeasured) reference_ = world.drone.position;
  const Vec3 cur = reference_;

  const double r = distance(cur, chest, cfg_.distance_mode);
  const double d = distance(cur, palm, cfg_.distance_mode);
  const double palm_chest = distance(palm, chest, cfg_.distance_mode);
  const Domain domain = classify_domain(r, palm_chest, user, cfg_);
  const double k = effective_k_prime(d, cfg_);
  status_.domain = domain;
  status_.d_palm = d;
  status_.r_chest = r;
  status_.k_prime = k;

  const bool approach = gesture.current == Gesture::kApproach;
  if (approach && domain != Domain::kHold) {
    const double rel_speed =
        (world.drone.velocity - palm_velocity_).norm();
    if (horizontal_distance(world.drone.position, palm) <
            cfg_.land_commit_dist &&
        rel_speed < cfg_.land_commit_speed) {
      transition(MissionPhase::kLanding);
      landing_z0_ = cur.z;
      descended_ = 0.0;
      frozen_.reset();
      return landing_step(world, gesture);
    }
  }

  const double scale = ramp_scale(world.t, gesture.current);
  if (!approach && scale == 0.0) {
    if (!frozen_) {
      Setpoint f;
      f.goal_position = cur;
      f.goal_yaw = horizontal_distance(cur, chest) > 0.0
                       ? goal_yaw_toward_chest(cur, chest)
                       : last_.goal_yaw;
      f.source_domain = domain;
      f.phase = MissionPhase::kFlight;
      frozen_ = f;
    }
    reference_ = frozen_->goal_position;
    return *frozen_;
  }
  frozen_.reset();

  Vec3 goal = cur;
  double speed = 0.0;
  switch (domain) {
    case Domain::kFar: {
      const double dh = horizontal_distance(cur, palm);
      const double step = std::min(cfg_.v_cruise * cfg_.delta_t, dh);
      if (dh > 0.0) goal = cur + horizontal(palm - cur) * (step / dh);
      speed = step / cfg_.delta_t;
      break;
    }
    case Domain::kWeber:
      goal = weber_goal(cur, palm, k, cfg_);
      speed = weber_speed(horizontal_distance(cur, palm), k, cfg_);
      break;
    case Domain::kArc:
      goal = arc_goal(cur, chest, palm, user.arm_length, k, cfg_);
      speed = horizontal_distance(goal, cur) / cfg_.delta_t;
      break;
    case Domain::kHold:
      break;
  }

  // Never step into the safety disk from outside it.
  const double r_goal = horizontal_distance(goal, chest);
  const double r_floor = std::min(cfg_.r_s, horizontal_distance(cur, chest));
  if (r_goal < r_floor) {
    const Vec3 out = r_goal > 0.0 ? horizontal(goal - chest) / r_goal
                                  : horizontal(cur - chest) /
                                        horizontal_distance(cur, chest);
    goal = {chest.x + out.x * r_floor, chest.y + out.y * r_floor, goal.z};
    speed = horizontal_distance(goal, cur) / cfg_.delta_t;
  }

  // Altitude rides in whatever is left of the v_max * dt budget.
  const double budget = cfg_.v_max * cfg_.delta_t;
  const double h = horizontal_distance(goal, cur);
  const double dz_max = std::sqrt(std::max(0.0, budget * budget - h * h));
  const double z_target = target_altitude(palm.z + cfg_.land_descent, user);
  goal.z = cur.z + std::clamp(z_target - cur.z, -dz_max, dz_max);

  if (scale < 1.0) {
    goal = cur + (goal - cur) * scale;
    speed *= scale;
  }
  goal.z = std::clamp(goal.z, user.elbow_height, user.eye_height);

  Setpoint sp;
  sp.goal_position = goal;
  sp.goal_yaw = goal_yaw_toward_chest(goal, chest);
  sp.commanded_speed = speed;
  sp.source_domain = domain;
  sp.phase = MissionPhase::kFlight;
  reference_ = goal;
  return sp;
}

Setpoint Planner::landing_step(const WorldState& world, const GestureState& gesture) {
  const Vec3& palm = world.user.palm.position;
  const Vec3& chest = world.user.chest.position;
  if (descended_ >= cfg_.land_descent) {
    transition(MissionPhase::kLanded);
    Setpoint sp = idle_setpoint(world);
    sp.source_domain = status_.domain;
    return sp;
  }
  if (gesture.current == Gesture::kStay) {
    // Touchdown pauses until the arm is offered again.
    Setpoint sp = last_;
    sp.commanded_speed = 0.0;
    sp.phase = MissionPhase::kLanding;
    return sp;
  }

  const Vec3 cur = reference_;
  const double dz =
      std::min(cfg_.land_descent_speed * cfg_.delta_t,
               cfg_.land_descent - descended_);
  const double budget = cfg_.v_max * cfg_.delta_t;
  const double h_budget = std::sqrt(std::max(0.0, budget * budget - dz * dz));
  const double dh = horizontal_distance(cur, palm);
  Vec3 goal = cur;
  if (dh > 0.0) {
    goal = cur + horizontal(palm - cur) * (std::min(dh, h_budget) / dh);
  }
  const double r_cur = horizontal_distance(cur, chest);
  const double r_floor = std::min(cfg_.r_s, r_cur);
  const double r_goal = horizontal_distance(goal, chest);
  if (r_goal < r_floor) {
    const Vec3 out = r_goal > 0.0 ? horizontal(goal - chest) / r_goal
                                  : horizontal(cur - chest) / r_cur;
    goal = {chest.x + out.x * r_floor, chest.y + out.y * r_floor, goal.z};
  }
  descended_ += dz;
  if (cfg_.land_descent - descended_ < 1e-12) descended_ = cfg_.land_descent;
  goal.z = landing_z0_ - descended_;

  Setpoint sp;
  sp.goal_position = goal;
  sp.goal_yaw = horizontal_distance(goal, chest) > 0.0
                    ? goal_yaw_toward_chest(goal, chest)
                    : last_.goal_yaw;
  sp.commanded_speed = (goal - cur).norm() / cfg_.delta_t;
  sp.source_domain = status_.domain;
  sp.phase = MissionPhase::kLanding;
  reference_ = goal;
  return sp;
}

}  // namespace palmland
