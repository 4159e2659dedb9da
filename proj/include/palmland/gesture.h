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
#include <string_view>

#include "palmland/core.h"

namespace palmland {

enum class Gesture { kStay, kApproach };

std::string_view to_string(Gesture g);
Gesture gesture_from_string(std::string_view s);

struct GestureConfig {
  double d_th = 0.30;             // chest-hand threshold [m]
  double hysteresis_band = 0.04;  // full width of the dead band [m]
  double min_hold = 0.2;          // dwell before a switch is accepted [s]

  void validate() const;
};

struct GestureState {
  Gesture current = Gesture::kStay;
  double last_transition_t = 0.0;
  // Time at which the opposite condition started to hold without a break.
  std::optional<double> pending_since;

  bool operator==(const GestureState&) const = default;
};

// Horizontal distance between palm and chest.
double chest_hand_distance(const UserModel& user);

// One debounced classification step. A stretched arm (d above the band)
// requests APPROACH, a bent arm (d at or below the band) requests STAY; the
// request only takes effect once it has persisted for min_hold seconds.
GestureState classify(double d, const GestureState& prev, double t,
                      const GestureConfig& cfg);

}  // namespace palmland
