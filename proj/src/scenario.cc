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

#include "palmland/scenario.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "json_fields.h"
#include "palmland/csv.h"
#include "palmland/error.h"

namespace palmland {

namespace {

struct ArmPose {
  double distance = 0.0;
  double bearing = 0.0;
};

// Chest-frame palm offset.
Vec3 arm_offset(const ArmPose& arm) {
  return {arm.distance * std::cos(arm.bearing),
          arm.distance * std::sin(arm.bearing), 0.0};
}

Vec3 walk_toward(const Vec3& from, const Vec3& to, double speed, double dt) {
  const Vec3 delta{to.x - from.x, to.y - from.y, 0.0};
  const double dist = std::hypot(delta.x, delta.y);
  const double travel = speed * dt;
  if (travel >= dist) return {to.x, to.y, from.z};
  return from + delta * (travel / dist);
}

Vec3 chest_position(const Scenario& s, double t) {
  Vec3 pos = s.user_init.chest.position;
  const ScenarioEvent* walk = nullptr;
  Vec3 walk_start = pos;
  for (const auto& e : s.events) {
    if (e.t > t) break;
    if (e.type != EventType::kWalk) continue;
    if (walk) pos = walk_toward(walk_start, walk->waypoint, walk->speed, e.t - walk->t);
    walk = &e;
    walk_start = pos;
  }
  if (walk) pos = walk_toward(walk_start, walk->waypoint, walk->speed, t - walk->t);
  return pos;
}

// Palm offset in the chest frame, ramping linearly between arm poses.
Vec3 palm_offset(const Scenario& s, double t) {
  const double initial = s.initial_palm == PalmMode::kStretch
                             ? s.user_init.arm_length
                             : s.bent_distance;
  Vec3 from = arm_offset({initial, s.initial_bearing});
  Vec3 to = from;
  double ramp_start = -1.0;
  for (const auto& e : s.events) {
    if (e.t > t) break;
    if (e.type != EventType::kStretch && e.type != EventType::kBend) continue;
    // Restart from wherever the previous ramp had reached.
    if (ramp_start >= 0.0) {
      const double f = std::min(1.0, (e.t - ramp_start) / kGestureRampSeconds);
      from = f >= 1.0 ? to : from + (to - from) * f;
    } else {
      from = to;
    }
    const double dist = e.type == EventType::kStretch ? s.user_init.arm_length
                                                      : s.bent_distance;
    to = arm_offset({dist, e.bearing});
    ramp_start = e.t;
  }
  if (ramp_start < 0.0) return to;
  const double f = (t - ramp_start) / kGestureRampSeconds;
  if (f >= 1.0) return to;
  return from + (to - from) * f;
}

Vec3 jitter_for(const Scenario& s, double t, int stream) {
  if (s.jitter <= 0.0) return {};
  std::seed_seq seq{static_cast<std::uint32_t>(s.seed),
                    static_cast<std::uint32_t>(s.seed >> 32),
                    static_cast<std::uint32_t>(std::llround(t * 1e6)),
                    static_cast<std::uint32_t>(stream)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> u(-s.jitter, s.jitter);
  const double x = u(rng), y = u(rng), z = u(rng);
  return {x, y, z};
}

std::string_view event_name(EventType t) {
  switch (t) {
    case EventType::kTakeoff: return "takeoff";
    case EventType::kStretch: return "stretch";
    case EventType::kBend: return "bend";
    case EventType::kWalk: return "walk";
  }
  return "?";
}

EventType event_from_name(const std::string& name, const std::string& where) {
  for (auto t : {EventType::kTakeoff, EventType::kStretch, EventType::kBend,
                 EventType::kWalk}) {
    if (event_name(t) == name) return t;
  }
  throw ConfigError(where, "unknown event type '" + name + "'");
}

PalmMode palm_mode_from_name(const std::string& name, const std::string& where) {
  if (name == "STRETCH") return PalmMode::kStretch;
  if (name == "BEND") return PalmMode::kBend;
  throw ConfigError(where, "must be STRETCH or BEND");
}

Quaternion nlerp(const Quaternion& a, Quaternion b, double f) {
  if (a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z < 0.0) {
    b = {-b.w, -b.x, -b.y, -b.z};
  }
  return Quaternion{a.w + (b.w - a.w) * f, a.x + (b.x - a.x) * f,
                    a.y + (b.y - a.y) * f, a.z + (b.z - a.z) * f}
      .normalized();
}

}  // namespace

void Scenario::validate() const {
  if (!(duration > 0.0)) throw ConfigError("scenario.duration", "must be > 0");
  try {
    user_init.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError("scenario.user", e.what());
  }
  if (!(bent_distance >= 0.0 && bent_distance < user_init.arm_length)) {
    throw ConfigError("scenario.user.bent_distance", "must be in [0, arm_length)");
  }
  if (!(jitter >= 0.0)) throw ConfigError("scenario.jitter", "must be >= 0");
  double prev = -1.0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    const std::string where = "scenario.events[" + std::to_string(i) + "]";
    if (!(e.t >= 0.0 && e.t <= duration)) {
      throw ConfigError(where + ".t", "must be within [0, duration]");
    }
    if (!(e.t > prev)) throw ConfigError(where + ".t", "must be strictly increasing");
    prev = e.t;
    if (e.type == EventType::kWalk && !(e.speed >= 0.0 && std::isfinite(e.speed))) {
      throw ConfigError(where + ".speed", "must be >= 0");
    }
  }
}

UserModel sample_user(const Scenario& s, double t) {
  if (!(t >= 0.0 && t <= s.duration)) {
    throw InvalidInput("sample time outside the scenario duration");
  }
  UserModel user = s.user_init;
  const Quaternion facing = Quaternion::from_yaw(s.user_yaw);
  const Vec3 chest = chest_position(s, t);
  const Vec3 offset = facing.rotate(palm_offset(s, t));
  user.chest.position = chest + jitter_for(s, t, 0);
  user.chest.orientation = facing;
  user.palm.position = Vec3{chest.x + offset.x, chest.y + offset.y, s.palm_height} +
                       jitter_for(s, t, 1);
  user.palm.orientation = facing;
  return user;
}

Scenario scenario_from_json(const nlohmann::json& j) {
  detail::Fields root(j, "scenario");
  Scenario s;
  s.name = root.string("name", "unnamed");
  s.duration = root.required_number("duration");
  const double seed = root.number("seed", 0.0);
  if (seed < 0.0 || seed != std::floor(seed)) {
    throw ConfigError("scenario.seed", "must be a non-negative integer");
  }
  s.seed = static_cast<std::uint64_t>(seed);
  s.jitter = root.number("jitter", 0.0);

  if (const auto* u = root.child("user")) {
    detail::Fields uf(*u, "scenario.user");
    s.user_init.chest.position = uf.vec3("chest", {0.0, 0.0, 1.25});
    s.user_yaw = uf.number("yaw", 0.0);
    s.user_init.arm_length = uf.number("arm_length", 0.7);
    s.user_init.elbow_height = uf.number("elbow_height", 1.0);
    s.user_init.eye_height = uf.number("eye_height", 1.6);
    s.palm_height = uf.number("palm_height", 1.1);
    s.bent_distance = uf.number("bent_distance", 0.15);
    s.initial_palm = palm_mode_from_name(uf.string("palm", "BEND"), uf.at("palm"));
    s.initial_bearing = uf.number("bearing", 0.0);
    uf.finish();
  } else {
    s.user_init.chest.position = {0.0, 0.0, 1.25};
  }

  if (const auto* d = root.child("drone")) {
    detail::Fields df(*d, "scenario.drone");
    s.drone_init.position = df.vec3("position", {});
    s.drone_init.orientation = Quaternion::from_yaw(df.number("yaw", 0.0));
    df.finish();
  }

  if (const auto* events = root.child("events")) {
    if (!events->is_array()) throw ConfigError("scenario.events", "must be an array");
    for (std::size_t i = 0; i < events->size(); ++i) {
      const std::string where = "scenario.events[" + std::to_string(i) + "]";
      detail::Fields ef((*events)[i], where);
      ScenarioEvent e;
      e.t = ef.required_number("t");
      e.type = event_from_name(ef.string("type", ""), ef.at("type"));
      e.bearing = ef.number("bearing", 0.0);
      if (e.type == EventType::kWalk) {
        if (!ef.has("to")) throw ConfigError(ef.at("to"), "is required for walk");
        e.waypoint = ef.vec3("to", {});
        e.speed = ef.required_number("speed");
      }
      ef.finish();
      s.events.push_back(e);
    }
  }
  root.finish();

  // Palm pose at t = 0 so user_init satisfies the body invariants.
  const UserModel at0 = [&] {
    Scenario probe = s;
    probe.events.clear();
    probe.jitter = 0.0;
    return sample_user(probe, 0.0);
  }();
  s.user_init.chest.orientation = at0.chest.orientation;
  s.user_init.palm = at0.palm;
  s.validate();
  return s;
}

nlohmann::ordered_json scenario_to_json(const Scenario& s) {
  nlohmann::ordered_json j;
  j["name"] = s.name;
  j["duration"] = s.duration;
  j["seed"] = s.seed;
  j["jitter"] = s.jitter;
  j["user"] = {
      {"chest", detail::vec_json(s.user_init.chest.position)},
      {"yaw", s.user_yaw},
      {"arm_length", s.user_init.arm_length},
      {"elbow_height", s.user_init.elbow_height},
      {"eye_height", s.user_init.eye_height},
      {"palm_height", s.palm_height},
      {"bent_distance", s.bent_distance},
      {"palm", s.initial_palm == PalmMode::kStretch ? "STRETCH" : "BEND"},
      {"bearing", s.initial_bearing},
  };
  j["drone"] = {{"position", detail::vec_json(s.drone_init.position)},
                {"yaw", quaternion_yaw(s.drone_init.orientation)}};
  nlohmann::ordered_json events = nlohmann::ordered_json::array();
  for (const auto& e : s.events) {
    nlohmann::ordered_json ej;
    ej["t"] = e.t;
    ej["type"] = std::string(event_name(e.type));
    if (e.type == EventType::kStretch || e.type == EventType::kBend) {
      ej["bearing"] = e.bearing;
    }
    if (e.type == EventType::kWalk) {
      ej["to"] = {e.waypoint.x, e.waypoint.y};
      ej["speed"] = e.speed;
    }
    events.push_back(ej);
  }
  j["events"] = events;
  return j;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, path.string() + ": " + e.what());
  }
  return scenario_from_json(j);
}

std::vector<std::string> canonical_scenario_names() {
  return {"approach_static", "switching", "walking_user"};
}

Scenario canonical_scenario(const std::string& name) {
  using nlohmann::json;
  const json user = {{"chest", {0.0, 0.0, 1.25}}, {"yaw", 0.0},
                     {"arm_length", 0.7},         {"elbow_height", 1.0},
                     {"eye_height", 1.6},         {"palm_height", 1.1},
                     {"bent_distance", 0.15},     {"palm", "BEND"}};
  if (name == "approach_static") {
    // Side approach: the straight line to the palm cuts into the arm circle,
    // so the run visits the far, Weber and arc domains.
    return scenario_from_json({
        {"name", name},
        {"duration", 40.0},
        {"user", user},
        {"drone", {{"position", {0.0, 3.0, 0.0}}, {"yaw", -kPi / 2}}},
        {"events",
         {{{"t", 0.5}, {"type", "takeoff"}},
          {{"t", 4.0}, {"type", "stretch"}}}},
    });
  }
  if (name == "switching") {
    return scenario_from_json({
        {"name", name},
        {"duration", 40.0},
        {"user", user},
        {"drone", {{"position", {2.6, 1.4, 0.0}}, {"yaw", kPi}}},
        {"events",
         {{{"t", 0.5}, {"type", "takeoff"}},
          {{"t", 4.0}, {"type", "stretch"}},
          {{"t", 5.5}, {"type", "bend"}},
          {{"t", 8.0}, {"type", "stretch"}},
          {{"t", 8.8}, {"type", "bend"}},
          {{"t", 12.0}, {"type", "stretch"}}}},
    });
  }
  if (name == "walking_user") {
    return scenario_from_json({
        {"name", name},
        {"duration", 60.0},
        {"user", user},
        {"drone", {{"position", {4.0, 0.0, 0.0}}, {"yaw", kPi}}},
        {"events",
         {{{"t", 0.5}, {"type", "takeoff"}},
          {{"t", 3.0}, {"type", "walk"}, {"to", {-1.0, 1.0}}, {"speed", 0.5}},
          {{"t", 4.0}, {"type", "stretch"}},
          {{"t", 6.0}, {"type", "walk"}, {"to", {-1.0, -1.0}}, {"speed", 0.5}},
          {{"t", 10.0}, {"type", "walk"}, {"to", {0.5, -0.5}}, {"speed", 0.5}}}},
    });
  }
  throw InvalidInput("unknown scenario '" + name + "'");
}

Scenario resolve_scenario(const std::string& name_or_path) {
  const auto names = canonical_scenario_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) {
    return canonical_scenario(name_or_path);
  }
  return load_scenario(name_or_path);
}

double UserTrace::duration() const {
  return samples.empty() ? 0.0 : samples.back().t - samples.front().t;
}

UserTrace parse_trace(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next_line() || line != kUserTraceHeader) {
    throw ParseError(1, "expected header '" + std::string(kUserTraceHeader) + "'");
  }

  UserTrace trace;
  while (next_line()) {
    if (line.empty()) continue;
    const auto fields = csv::split(line);
    if (fields.size() != 15) {
      throw ParseError(lineno, "expected 15 fields, got " + std::to_string(fields.size()));
    }
    double v[15];
    for (int i = 0; i < 15; ++i) v[i] = csv::parse(fields[i], lineno);
    UserTraceSample s;
    s.t = v[0];
    s.chest.position = {v[1], v[2], v[3]};
    s.chest.orientation = Quaternion{v[4], v[5], v[6], v[7]};
    s.palm.position = {v[8], v[9], v[10]};
    s.palm.orientation = Quaternion{v[11], v[12], v[13], v[14]};
    for (const auto* q : {&s.chest.orientation, &s.palm.orientation}) {
      if (std::abs(q->norm() - 1.0) > 1e-6) {
        throw ParseError(lineno, "quaternion is not unit norm");
      }
    }
    if (!trace.samples.empty() && !(s.t > trace.samples.back().t)) {
      throw FormatError("non-monotone time at line " + std::to_string(lineno));
    }
    trace.samples.push_back(s);
  }
  if (trace.samples.size() < 2) throw FormatError("trace needs at least 2 samples");

  const auto& smp = trace.samples;
  const double mean_dt = (smp.back().t - smp.front().t) / (smp.size() - 1);
  for (std::size_t i = 1; i < smp.size(); ++i) {
    const double dt = smp[i].t - smp[i - 1].t;
    if (std::abs(dt - mean_dt) > 0.01 * mean_dt) {
      throw FormatError("non-uniform sampling between t=" + csv::format(smp[i - 1].t) +
                        " and t=" + csv::format(smp[i].t));
    }
  }
  trace.rate = 1.0 / mean_dt;
  return trace;
}

UserTrace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace file " + path.string());
  return parse_trace(in);
}

void write_trace(std::ostream& out, const UserTrace& trace) {
  out << kUserTraceHeader << '\n';
  for (const auto& s : trace.samples) {
    const double v[15] = {s.t,
                          s.chest.position.x, s.chest.position.y, s.chest.position.z,
                          s.chest.orientation.w, s.chest.orientation.x,
                          s.chest.orientation.y, s.chest.orientation.z,
                          s.palm.position.x, s.palm.position.y, s.palm.position.z,
                          s.palm.orientation.w, s.palm.orientation.x,
                          s.palm.orientation.y, s.palm.orientation.z};
    for (int i = 0; i < 15; ++i) {
      if (i) out << ',';
      out << csv::format(v[i]);
    }
    out << '\n';
  }
}

UserModel sample_trace(const UserTrace& trace, const UserModel& geometry, double t) {
  if (trace.samples.empty()) throw InvalidInput("empty trace");
  const auto& smp = trace.samples;
  UserModel user = geometry;
  auto place = [&](const UserTraceSample& s) {
    user.chest = s.chest;
    user.palm = s.palm;
  };
  if (t <= smp.front().t) {
    place(smp.front());
    return user;
  }
  if (t >= smp.back().t) {
    place(smp.back());
    return user;
  }
  const auto it = std::upper_bound(smp.begin(), smp.end(), t,
                                   [](double v, const UserTraceSample& s) { return v < s.t; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double f = (t - a.t) / (b.t - a.t);
  user.chest.position = a.chest.position + (b.chest.position - a.chest.position) * f;
  user.palm.position = a.palm.position + (b.palm.position - a.palm.position) * f;
  user.chest.orientation = nlerp(a.chest.orientation, b.chest.orientation, f);
  user.palm.orientation = nlerp(a.palm.orientation, b.palm.orientation, f);
  return user;
}

}  // namespace palmland
