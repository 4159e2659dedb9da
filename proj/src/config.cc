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

#include "palmland/config.h"

#include <cmath>
#include <fstream>

#include "json_fields.h"
#include "palmland/error.h"

namespace palmland {

namespace {

using detail::Fields;
using detail::vec_json;

void read_pid(const nlohmann::json& j, const std::string& path, PidGains& g) {
  Fields f(j, path);
  g.kp = f.vec3("kp", g.kp);
  g.ki = f.vec3("ki", g.ki);
  g.kd = f.vec3("kd", g.kd);
  g.integrator_limit = f.vec3("integrator_limit", g.integrator_limit);
  g.output_limit = f.vec3("output_limit", g.output_limit);
  f.finish();
}

nlohmann::ordered_json pid_json(const PidGains& g) {
  return {{"kp", vec_json(g.kp)},
          {"ki", vec_json(g.ki)},
          {"kd", vec_json(g.kd)},
          {"integrator_limit", vec_json(g.integrator_limit)},
          {"output_limit", vec_json(g.output_limit)}};
}

void read_planner(const nlohmann::json& j, PlannerConfig& p) {
  Fields f(j, "planner");
  p.r_v = f.number("r_v", p.r_v);
  p.r_s = f.number("r_s", p.r_s);
  p.k_prime = f.number("k_prime", p.k_prime);
  p.k_prime_boost = f.number("k_prime_boost", p.k_prime_boost);
  p.boost_radius = f.number("boost_radius", p.boost_radius);
  p.delta_t = f.number("delta_t", p.delta_t);
  p.v_cruise = f.number("v_cruise", p.v_cruise);
  p.v_max = f.number("v_max", p.v_max);
  p.land_commit_dist = f.number("land_commit_dist", p.land_commit_dist);
  p.land_commit_speed = f.number("land_commit_speed", p.land_commit_speed);
  p.takeoff_altitude = f.number("takeoff_altitude", p.takeoff_altitude);
  p.takeoff_speed = f.number("takeoff_speed", p.takeoff_speed);
  p.takeoff_tolerance = f.number("takeoff_tolerance", p.takeoff_tolerance);
  p.land_descent = f.number("land_descent", p.land_descent);
  p.land_descent_speed = f.number("land_descent_speed", p.land_descent_speed);
  p.switch_ramp = f.boolean("switch_ramp", p.switch_ramp);
  p.switch_ramp_duration = f.number("switch_ramp_duration", p.switch_ramp_duration);
  const std::string mode = f.string("distance_mode", "planar");
  if (mode == "planar") {
    p.distance_mode = DistanceMode::kPlanar;
  } else if (mode == "3d") {
    p.distance_mode = DistanceMode::k3d;
  } else {
    throw ConfigError("planner.distance_mode", "must be planar or 3d");
  }
  const std::string anchor = f.string("anchor", "commanded");
  if (anchor == "commanded") {
    p.anchor = PlannerAnchor::kCommanded;
  } else if (anchor == "measured") {
    p.anchor = PlannerAnchor::kMeasured;
  } else {
    throw ConfigError("planner.anchor", "must be commanded or measured");
  }
  f.finish();
}

}  // namespace

std::string_view to_string(TrackingMode m) {
  return m == TrackingMode::kDynamic ? "dynamic" : "ideal";
}

TrackingMode tracking_mode_from_string(const std::string& s) {
  if (s == "dynamic") return TrackingMode::kDynamic;
  if (s == "ideal") return TrackingMode::kIdeal;
  throw ConfigError("mode", "must be dynamic or ideal");
}

void RunConfig::validate() const {
  planner.validate();
  controller.validate();
  drone.validate();
  gesture.validate();
  if (scenario.empty() == trace.empty()) {
    throw ConfigError("scenario", "exactly one of scenario or trace must be set");
  }
  const double ratio = controller.physics_rate / controller.control_rate;
  if (std::abs(ratio - std::round(ratio)) > 1e-9) {
    throw ConfigError("controller.physics_rate",
                      "must be an integer multiple of control_rate");
  }
  const double per_tick = planner.delta_t * controller.control_rate;
  if (per_tick < 1.0 - 1e-9 || std::abs(per_tick - std::round(per_tick)) > 1e-9) {
    throw ConfigError("planner.delta_t",
                      "must be an integer number of control periods");
  }
  if (duration_override && !(*duration_override > 0.0)) {
    throw ConfigError("duration_override", "must be > 0");
  }
  if (!(metrics.max_lag >= 0.0)) throw ConfigError("metrics.max_lag", "must be >= 0");
  if (!(metrics.settle_window >= 0.0)) {
    throw ConfigError("metrics.settle_window", "must be >= 0");
  }
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  Fields f(j, "");
  if (const auto* p = f.child("planner")) read_planner(*p, cfg.planner);
  if (const auto* c = f.child("controller")) {
    Fields cf(*c, "controller");
    if (const auto* pos = cf.child("position")) {
      read_pid(*pos, "controller.position", cfg.controller.position);
    }
    if (const auto* att = cf.child("attitude")) {
      read_pid(*att, "controller.attitude", cfg.controller.attitude);
    }
    cfg.controller.max_tilt = cf.number("max_tilt", cfg.controller.max_tilt);
    cfg.controller.setpoint_ramp = cf.number("setpoint_ramp", cfg.controller.setpoint_ramp);
    cfg.controller.control_rate = cf.number("control_rate", cfg.controller.control_rate);
    cfg.controller.physics_rate = cf.number("physics_rate", cfg.controller.physics_rate);
    cf.finish();
  }
  if (const auto* d = f.child("drone")) {
    Fields df(*d, "drone");
    auto& p = cfg.drone;
    p.mass = df.number("mass", p.mass);
    p.inertia = df.vec3("inertia", p.inertia);
    p.max_thrust = df.number("max_thrust", 3.0 * p.mass * kGravity);
    p.max_torque = df.number("max_torque", p.max_torque);
    p.flap_frequency = df.number("flap_frequency", p.flap_frequency);
    p.flap_ripple = df.number("flap_ripple", p.flap_ripple);
    p.drag_coeff = df.number("drag_coeff", p.drag_coeff);
    df.finish();
  }
  if (const auto* g = f.child("gesture")) {
    Fields gf(*g, "gesture");
    cfg.gesture.d_th = gf.number("d_th", cfg.gesture.d_th);
    cfg.gesture.hysteresis_band = gf.number("hysteresis_band", cfg.gesture.hysteresis_band);
    cfg.gesture.min_hold = gf.number("min_hold", cfg.gesture.min_hold);
    gf.finish();
  }
  if (const auto* m = f.child("metrics")) {
    Fields mf(*m, "metrics");
    cfg.metrics.max_lag = mf.number("max_lag", cfg.metrics.max_lag);
    cfg.metrics.settle_window = mf.number("settle_window", cfg.metrics.settle_window);
    mf.finish();
  }
  if (const auto* u = f.child("user")) {
    Fields uf(*u, "user");
    cfg.trace_user.arm_length = uf.number("arm_length", cfg.trace_user.arm_length);
    cfg.trace_user.elbow_height = uf.number("elbow_height", cfg.trace_user.elbow_height);
    cfg.trace_user.eye_height = uf.number("eye_height", cfg.trace_user.eye_height);
    uf.finish();
  }
  if (const auto* d = f.child("replay_drone")) {
    Fields df(*d, "replay_drone");
    cfg.trace_drone.position = df.vec3("position", cfg.trace_drone.position);
    if (df.has("yaw")) {
      cfg.trace_drone.orientation = Quaternion::from_yaw(df.number("yaw", 0.0));
    }
    cfg.trace_takeoff_t = df.number("takeoff_t", cfg.trace_takeoff_t);
    df.finish();
  }
  cfg.scenario = f.string("scenario", "");
  cfg.trace = f.string("trace", "");
  cfg.mode = tracking_mode_from_string(f.string("mode", "dynamic"));
  cfg.out = f.string("out", cfg.out);
  if (f.has("seed")) {
    const double seed = f.number("seed", 0.0);
    if (seed < 0.0 || seed != std::floor(seed)) {
      throw ConfigError("seed", "must be a non-negative integer");
    }
    cfg.seed = static_cast<std::uint64_t>(seed);
  }
  if (f.has("duration_override")) {
    cfg.duration_override = f.number("duration_override", 0.0);
  }
  f.finish();
  // Scenario or trace may still arrive from the command line, so only the
  // sub-configurations are checked here.
  cfg.planner.validate();
  cfg.controller.validate();
  cfg.drone.validate();
  cfg.gesture.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

nlohmann::ordered_json run_config_to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  const auto& p = cfg.planner;
  j["planner"] = {
      {"r_v", p.r_v},
      {"r_s", p.r_s},
      {"k_prime", p.k_prime},
      {"k_prime_boost", p.k_prime_boost},
      {"boost_radius", p.boost_radius},
      {"delta_t", p.delta_t},
      {"v_cruise", p.v_cruise},
      {"v_max", p.v_max},
      {"land_commit_dist", p.land_commit_dist},
      {"land_commit_speed", p.land_commit_speed},
      {"takeoff_altitude", p.takeoff_altitude},
      {"takeoff_speed", p.takeoff_speed},
      {"takeoff_tolerance", p.takeoff_tolerance},
      {"land_descent", p.land_descent},
      {"land_descent_speed", p.land_descent_speed},
      {"switch_ramp", p.switch_ramp},
      {"switch_ramp_duration", p.switch_ramp_duration},
      {"distance_mode", p.distance_mode == DistanceMode::kPlanar ? "planar" : "3d"},
      {"anchor", p.anchor == PlannerAnchor::kCommanded ? "commanded" : "measured"},
  };
  j["controller"] = {{"position", pid_json(cfg.controller.position)},
                     {"attitude", pid_json(cfg.controller.attitude)},
                     {"max_tilt", cfg.controller.max_tilt},
                     {"setpoint_ramp", cfg.controller.setpoint_ramp},
                     {"control_rate", cfg.controller.control_rate},
                     {"physics_rate", cfg.controller.physics_rate}};
  const auto& d = cfg.drone;
  j["drone"] = {{"mass", d.mass},
                {"inertia", vec_json(d.inertia)},
                {"max_thrust", d.max_thrust},
                {"max_torque", d.max_torque},
                {"flap_frequency", d.flap_frequency},
                {"flap_ripple", d.flap_ripple},
                {"drag_coeff", d.drag_coeff}};
  j["gesture"] = {{"d_th", cfg.gesture.d_th},
                  {"hysteresis_band", cfg.gesture.hysteresis_band},
                  {"min_hold", cfg.gesture.min_hold}};
  j["metrics"] = {{"max_lag", cfg.metrics.max_lag},
                  {"settle_window", cfg.metrics.settle_window}};
  j["mode"] = std::string(to_string(cfg.mode));
  if (!cfg.scenario.empty()) j["scenario"] = cfg.scenario;
  if (!cfg.trace.empty()) j["trace"] = cfg.trace;
  return j;
}

}  // namespace palmland
