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

#include "palmland/gesture.h"

#include <cmath>
#include <string>

#include "palmland/error.h"

namespace palmland {

namespace {

// Planner ticks accumulate as multiples of 0.1 s; absorb the rounding so a
// 0.2 s hold is met on the second tick rather than the third.
constexpr double kTimeSlack = 1e-9;

}  // namespace

std::string_view to_string(Gesture g) {
  return g == Gesture::kStay ? "STAY" : "APPROACH";
}

Gesture gesture_from_string(std::string_view s) {
  if (s == "STAY") return Gesture::kStay;
  if (s == "APPROACH") return Gesture::kApproach;
  throw InvalidInput("unknown gesture '" + std::string(s) + "'");
}

void GestureConfig::validate() const {
  if (!(d_th > 0.0)) throw ConfigError("gesture.d_th", "must be > 0");
  if (!(hysteresis_band >= 0.0 && hysteresis_band < d_th)) {
    throw ConfigError("gesture.hysteresis_band", "must be in [0, d_th)");
  }
  if (!(min_hold >= 0.0)) throw ConfigError("gesture.min_hold", "must be >= 0");
}

double chest_hand_distance(const UserModel& user) {
  return horizontal_distance(user.palm.position, user.chest.position);
}

GestureState classify(double d, const GestureState& prev, double t,
                      const GestureConfig& cfg) {
  if (!(d >= 0.0) || !std::isfinite(d)) {
    throw InvalidInput("chest-hand distance must be finite and >= 0");
  }
  if (t < prev.last_transition_t) {
    throw InvalidInput("classification time precedes the last transition");
  }

  const double half = 0.5 * cfg.hysteresis_band;
  std::optional<Gesture> requested;
  if (d > cfg.d_th + half) {
    requested = Gesture::kApproach;
  } else if (d <= cfg.d_th - half) {
    // Ties at the threshold resolve to STAY: stopping is the safe action.
    requested = Gesture::kStay;
  }

  GestureState next = prev;
  if (!requested || *requested == prev.current) {
    next.pending_since.reset();
    return next;
  }

  const double since = prev.pending_since.value_or(t);
  if (t - since + kTimeSlack >= cfg.min_hold) {
    return GestureState{*requested, t, std::nullopt};
  }
  next.pending_since = since;
  return next;
}

}  // namespace palmland
