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


// Shared helpers for the unit tests: a seeded value generator for property
// checks and small fixtures.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "palmland/core.h"
#include "palmland/world.h"

namespace palmland::testing {

// Deterministic random values for property tests. Each test seeds its own
// instance so failures reproduce.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  int integer(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  bool coin() { return integer(0, 1) == 1; }

  Vec3 vec3(double lo, double hi) {
    return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)};
  }

  // Point at a given horizontal radius and random bearing around `center`.
  Vec3 on_ring(const Vec3& center, double radius, double z) {
    const double a = uniform(-kPi, kPi);
    return {center.x + radius * std::cos(a), center.y + radius * std::sin(a), z};
  }

  // Uniform on the unit 3-sphere.
  Quaternion unit_quaternion() {
    std::normal_distribution<double> n(0.0, 1.0);
    Quaternion q{n(rng_), n(rng_), n(rng_), n(rng_)};
    return q.normalized();
  }

 private:
  std::mt19937_64 rng_;
};

inline UserModel standing_user(const Vec3& chest = {0.0, 0.0, 1.25},
                               const Vec3& palm_offset = {0.7, 0.0, -0.15}) {
  UserModel u;
  u.chest.position = chest;
  u.palm.position = chest + palm_offset;
  return u;
}

inline DroneState hovering_at(const Vec3& p, double yaw = 0.0) {
  DroneState d;
  d.position = p;
  d.orientation = Quaternion::from_yaw(yaw);
  return d;
}

}  // namespace palmland::testing
