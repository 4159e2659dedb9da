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


#include "palmland/bridge.h"

#include <algorithm>
#include <cmath>

#include "palmland/error.h"

namespace palmland {

namespace {

using nlohmann::json;

constexpr double kEventSlack = 1e-9;

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json message(std::string_view type) {
  return json{{"v", kProtocolVersion}, {"type", type}};
}

std::string err_text(const json& id, std::string_view code, const std::string& what) {
  json m = message("err");
  if (!id.is_null()) m["id"] = id;
  m["code"] = code;
  m["message"] = what;
  return m.dump();
}

// Reply sent for a rejected command.
struct Rejection {
  std::string code;
  std::string what;
};

double require_number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw Rejection{"malformed", std::string("'") + key + "' must be a number"};
  }
  const double v = j.at(key).get<double>();
  if (!std::isfinite(v)) {
    throw Rejection{"malformed", std::string("'") + key + "' must be finite"};
  }
  return v;
}

std::string require_string(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw Rejection{"malformed", std::string("'") + key + "' must be a string"};
  }
  return j.at(key).get<std::string>();
}

PalmMode scripted_palm_mode(const Scenario& s, double t) {
  PalmMode mode = s.initial_palm;
  for (const auto& e : s.events) {
    if (e.t > t) break;
    if (e.type == EventType::kStretch) mode = PalmMode::kStretch;
    if (e.type == EventType::kBend) mode = PalmMode::kBend;
  }
  return mode;
}

std::string_view palm_mode_name(PalmMode m) {
  return m == PalmMode::kStretch ? "STRETCH" : "BEND";
}

double palm_target(const Scenario& s, PalmMode m) {
  return m == PalmMode::kStretch ? s.user_init.arm_length : s.bent_distance;
}

}  // namespace

std::string_view to_string(ClientRole role) {
  return role == ClientRole::kController ? "controller" : "observer";
}

LiveSession::LiveSession(const RunConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  if (cfg_.scenario.empty()) {
    throw ConfigError("scenario", "live sessions need a scenario");
  }
  scenario_ = resolve_scenario(cfg_.scenario);
  if (cfg_.seed) scenario_.seed = *cfg_.seed;
  for (const auto& e : scenario_.events) {
    if (e.type == EventType::kTakeoff) takeoffs_.push_back(e.t);
  }
  sim_ = std::make_unique<Simulation>(cfg_, scenario_.drone_init,
                                      [this](double t) { return user_at(t); });
}

ClientRole LiveSession::role(std::uint64_t client) const {
  return controller_ == client ? ClientRole::kController : ClientRole::kObserver;
}

Outgoing LiveSession::connect(std::uint64_t client) {
  clients_.push_back(client);
  if (!controller_) controller_ = client;
  json m = message("ack");
  m["cmd"] = "hello";
  m["client"] = client;
  m["role"] = to_string(role(client));
  m["scenario"] = scenario_.name;
  return {client, m.dump()};
}

void LiveSession::disconnect(std::uint64_t client) {
  clients_.erase(std::remove(clients_.begin(), clients_.end(), client), clients_.end());
  if (controller_ != client) return;
  controller_.reset();
  // Loss of the operator: stand still, bend the arm, stop the drone.
  take_over();
  sim_->defer([this](Simulation& s) {
    const double t = s.time();
    user_at(t);
    manual_->velocity = {};
    manual_->palm_mode = PalmMode::kBend;
    manual_->palm_distance = scenario_.bent_distance;
    manual_->palm_from = scenario_.bent_distance;
    manual_->ramp_start = t;
    s.force_stay();
  });
}

void LiveSession::take_over() {
  if (manual_) return;
  const UserModel& u = sim_->user();
  ManualUser m;
  m.chest = u.chest.position;
  m.chest_yaw = quaternion_yaw(u.chest.orientation.normalized());
  const Vec3 off = u.palm.position - u.chest.position;
  m.palm_bearing = std::atan2(off.y, off.x);
  m.palm_distance = std::hypot(off.x, off.y);
  m.palm_from = m.palm_distance;
  m.palm_mode = scripted_palm_mode(scenario_, sim_->time());
  m.ramp_start = sim_->time();
  m.last_t = sim_->time();
  manual_ = m;
}

UserModel LiveSession::user_at(double t) {
  if (!manual_) return sample_user(scenario_, std::min(t, scenario_.duration));
  ManualUser& m = *manual_;
  m.chest = m.chest + m.velocity * (t - m.last_t);
  m.last_t = t;
  const double target = palm_target(scenario_, m.palm_mode);
  const double f = std::clamp((t - m.ramp_start) / kGestureRampSeconds, 0.0, 1.0);
  m.palm_distance = m.palm_from + (target - m.palm_from) * f;

  UserModel u = scenario_.user_init;
  u.chest.position = m.chest;
  u.chest.orientation = Quaternion::from_yaw(m.chest_yaw);
  u.palm.position = {m.chest.x + m.palm_distance * std::cos(m.palm_bearing),
                     m.chest.y + m.palm_distance * std::sin(m.palm_bearing),
                     scenario_.palm_height};
  u.palm.orientation = u.chest.orientation;
  return u;
}

Outgoing LiveSession::handle(std::uint64_t client, const std::string& text) {
  json id;
  try {
    json msg;
    try {
      msg = json::parse(text);
    } catch (const json::exception& e) {
      throw Rejection{"malformed", std::string("not JSON: ") + e.what()};
    }
    if (!msg.is_object()) throw Rejection{"malformed", "message must be an object"};
    if (msg.contains("id")) id = msg.at("id");
    if (!msg.contains("v") || msg.at("v") != kProtocolVersion) {
      throw Rejection{"unsupported_version", "expected v=1"};
    }
    if (!msg.contains("type") || msg.at("type") != "cmd") {
      throw Rejection{"malformed", "only 'cmd' messages are accepted"};
    }
    if (role(client) != ClientRole::kController) {
      throw Rejection{"read_only", "another client holds control"};
    }
    apply(msg);
    json ack = message("ack");
    if (!id.is_null()) ack["id"] = id;
    ack["cmd"] = msg.at("cmd");
    return {client, ack.dump()};
  } catch (const Rejection& r) {
    return {client, err_text(id, r.code, r.what)};
  }
}

void LiveSession::apply(const json& msg) {
  const std::string cmd = require_string(msg, "cmd");
  if (cmd == "set_user_velocity") {
    const double vx = require_number(msg, "vx");
    const double vy = require_number(msg, "vy");
    if (std::hypot(vx, vy) > kMaxUserSpeed) {
      throw Rejection{"out_of_range", "user speed exceeds 2 m/s"};
    }
    take_over();
    sim_->defer([this, vx, vy](Simulation& s) {
      user_at(s.time());
      manual_->velocity = {vx, vy, 0.0};
    });
  } else if (cmd == "set_palm_mode") {
    const std::string mode = require_string(msg, "mode");
    if (mode != "STRETCH" && mode != "BEND") {
      throw Rejection{"out_of_range", "mode must be STRETCH or BEND"};
    }
    const PalmMode m = mode == "STRETCH" ? PalmMode::kStretch : PalmMode::kBend;
    take_over();
    sim_->defer([this, m](Simulation& s) {
      const double t = s.time();
      user_at(t);
      if (manual_->palm_mode == m) return;
      manual_->palm_mode = m;
      manual_->palm_from = manual_->palm_distance;
      manual_->ramp_start = t;
    });
  } else if (cmd == "mission") {
    const std::string action = require_string(msg, "action");
    if (action == "takeoff") {
      if (sim_->phase() != MissionPhase::kGrounded) {
        throw Rejection{"invalid_state", "takeoff needs a grounded drone"};
      }
      sim_->defer([](Simulation& s) { s.request_takeoff(); });
    } else if (action == "reset") {
      sim_->defer([](Simulation& s) { s.reset(); });
    } else {
      throw Rejection{"out_of_range", "action must be takeoff or reset"};
    }
  } else if (cmd == "set_param") {
    const std::string key = require_string(msg, "key");
    const double value = require_number(msg, "value");
    if (key == "k_prime" || key == "r_v") {
      PlannerConfig p = sim_->config().planner;
      (key == "k_prime" ? p.k_prime : p.r_v) = value;
      try {
        p.validate();
      } catch (const ConfigError& e) {
        throw Rejection{"invalid_param", e.what()};
      }
      if (key == "r_v" && !(value > scenario_.user_init.arm_length)) {
        throw Rejection{"invalid_param", "r_v must exceed the arm length"};
      }
      sim_->defer([key, value](Simulation& s) {
        PlannerConfig q = s.config().planner;
        (key == "k_prime" ? q.k_prime : q.r_v) = value;
        s.set_planner_config(q);
      });
    } else if (key == "d_th") {
      GestureConfig g = sim_->config().gesture;
      g.d_th = value;
      try {
        g.validate();
      } catch (const ConfigError& e) {
        throw Rejection{"invalid_param", e.what()};
      }
      sim_->defer([value](Simulation& s) {
        GestureConfig q = s.config().gesture;
        q.d_th = value;
        s.set_gesture_config(q);
      });
    } else {
      throw Rejection{"invalid_param", "'" + key + "' is not live-tunable"};
    }
  } else {
    throw Rejection{"unknown_command", "unknown cmd '" + cmd + "'"};
  }
}

void LiveSession::step() {
  const auto per_planner = static_cast<std::uint64_t>(
      std::llround(sim_->planner_dt() / sim_->physics_dt()));
  if (sim_->ticks() % per_planner == 0) {
    while (next_takeoff_ < takeoffs_.size() &&
           takeoffs_[next_takeoff_] <= sim_->time() + kEventSlack) {
      sim_->defer([](Simulation& s) { s.request_takeoff(); });
      ++next_takeoff_;
    }
  }
  sim_->step();
}

json LiveSession::state() const {
  const Simulation& s = *sim_;
  const DroneState& d = s.drone();
  const Setpoint& sp = s.setpoint();
  const UserModel& u = s.user();
  const PlannerStatus& st = s.status();
  const Quaternion q = d.orientation;

  json m = message("state");
  m["t"] = s.time();
  m["phase"] = to_string(s.phase());
  m["domain"] = to_string(st.domain);
  m["gesture"] = to_string(s.gesture().current);
  m["drone"] = {{"position", vec_json(d.position)},
                {"velocity", vec_json(d.velocity)},
                {"orientation", json::array({q.w, q.x, q.y, q.z})},
                {"yaw", quaternion_yaw(q.normalized())}};
  m["setpoint"] = {{"position", vec_json(sp.goal_position)},
                   {"yaw", sp.goal_yaw},
                   {"speed", sp.commanded_speed}};
  m["user"] = {
      {"chest", vec_json(u.chest.position)},
      {"palm", vec_json(u.palm.position)},
      {"chest_yaw", quaternion_yaw(u.chest.orientation.normalized())},
      {"arm_length", u.arm_length},
      {"palm_mode", palm_mode_name(manual_ ? manual_->palm_mode
                                           : scripted_palm_mode(scenario_, s.time()))},
      {"manual", manual_.has_value()}};
  m["d_palm"] = st.d_palm;
  m["r_chest"] = st.r_chest;
  m["k_prime"] = st.k_prime;
  m["cmd_speed"] = sp.commanded_speed;
  m["params"] = {{"k_prime", s.config().planner.k_prime},
                 {"d_th", s.config().gesture.d_th},
                 {"r_v", s.config().planner.r_v},
                 {"r_s", s.config().planner.r_s}};
  m["controller"] = controller_.has_value();
  return m;
}

}  // namespace palmland
