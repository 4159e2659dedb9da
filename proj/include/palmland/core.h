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

#include <array>
#include <cmath>
#include <numbers>

namespace palmland {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kGravity = 9.81;

// World frame: right-handed, z up, meters.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;

  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  constexpr Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

using Mat3 = std::array<std::array<double, 3>, 3>;

Vec3 operator*(const Mat3& m, const Vec3& v);

// Hamilton convention, w first. Rotates body-frame vectors into the world.
struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static Quaternion identity() { return {}; }
  static Quaternion from_axis_angle(const Vec3& axis, double angle);
  static Quaternion from_yaw(double yaw);
  // Z-Y-X (yaw, pitch, roll) composition.
  static Quaternion from_euler(double roll, double pitch, double yaw);
  static Quaternion from_matrix(const Mat3& m);

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
  Quaternion normalized() const;
  Quaternion conjugate() const { return {w, -x, -y, -z}; }
  Quaternion operator*(const Quaternion& o) const;
  bool operator==(const Quaternion&) const = default;

  Mat3 to_matrix() const;
  Vec3 rotate(const Vec3& v) const;
  bool finite() const {
    return std::isfinite(w) && std::isfinite(x) && std::isfinite(y) &&
           std::isfinite(z);
  }
};

// Roll, pitch and yaw of a Z-Y-X decomposition.
struct Euler {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

Euler to_euler(const Quaternion& q);

struct Pose {
  Vec3 position;
  Quaternion orientation;
};

// The virtual user. Heights are absolute z values in the world frame.
struct UserModel {
  Pose chest;
  Pose palm;
  double arm_length = 0.7;
  double elbow_height = 1.0;
  double eye_height = 1.6;

  // Throws InvalidInput when the body geometry is inconsistent.
  void validate() const;
};

enum class DistanceMode { kPlanar, k3d };

double horizontal_distance(const Vec3& a, const Vec3& b);
double distance(const Vec3& a, const Vec3& b, DistanceMode mode);

// Heading about +z in (-pi, pi]. Throws InvalidInput for non-unit input.
double quaternion_yaw(const Quaternion& q);

// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

}  // namespace palmland
