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
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "palmland/core.h"

namespace palmland {

enum class PalmMode { kBend, kStretch };

enum class EventType { kTakeoff, kStretch, kBend, kWalk };

struct ScenarioEvent {
  double t = 0.0;
  EventType type = EventType::kTakeoff;
  double bearing = 0.0;  // stretch/bend: arm direction relative to chest yaw
  Vec3 waypoint;         // walk: chest destination (z ignored)
  double speed = 0.0;    // walk [m/s]
};

// Scripted user behavior for one deterministic run.
struct Scenario {
  std::string name;
  double duration = 60.0;
  UserModel user_init;
  double user_yaw = 0.0;
  double palm_height = 1.1;
  double bent_distance = 0.15;
  PalmMode initial_palm = PalmMode::kBend;
  double initial_bearing = 0.0;
  Pose drone_init;
  std::vector<ScenarioEvent> events;
  std::uint64_t seed = 0;
  double jitter = 0.0;  // uniform +- amplitude on tracked user positions [m]

  void validate() const;
};

// Arm ramps take this long for both STRETCH and BEND.
inline constexpr double kGestureRampSeconds = 0.5;

// User pose at time t in [0, duration]. Throws InvalidInput outside it.
UserModel sample_user(const Scenario& scenario, double t);

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::ordered_json scenario_to_json(const Scenario& scenario);
Scenario load_scenario(const std::filesystem::path& path);

std::vector<std::string> canonical_scenario_names();
// Throws InvalidInput for an unknown name.
Scenario canonical_scenario(const std::string& name);

// Either a canonical name or a path to a scenario file.
Scenario resolve_scenario(const std::string& name_or_path);

struct UserTraceSample {
  double t = 0.0;
  Pose chest;
  Pose palm;
};

// Recorded chest/palm stream at a uniform rate.
struct UserTrace {
  std::vector<UserTraceSample> samples;
  double rate = 0.0;  // [Hz]

  double duration() const;
};

inline constexpr std::string_view kUserTraceHeader =
    "t,chest_x,chest_y,chest_z,chest_qw,chest_qx,chest_qy,chest_qz,"
    "palm_x,palm_y,palm_z,palm_qw,palm_qx,palm_qy,palm_qz";

UserTrace parse_trace(std::istream& in);
UserTrace load_trace(const std::filesystem::path& path);
void write_trace(std::ostream& out, const UserTrace& trace);

// Linear interpolation of positions, normalized lerp of orientations. Body
// geometry comes from `geometry`. t is clamped to the trace span.
UserModel sample_trace(const UserTrace& trace, const UserModel& geometry,
                       double t);

}  // namespace palmland
