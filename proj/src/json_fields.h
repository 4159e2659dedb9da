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

#include <cmath>
#include <set>
#include <string>

#include "json.hpp"
#include "palmland/core.h"
#include "palmland/error.h"

namespace palmland::detail {

// Typed, path-aware access to one JSON object. Every key read is recorded so
// finish() can reject typos instead of silently ignoring them.
class Fields {
 public:
  Fields(const nlohmann::json& j, std::string path)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "must be an object");
  }

  std::string at(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return as_number(j_.at(key), at(key));
  }

  double required_number(const std::string& key) {
    if (!has(key)) throw ConfigError(at(key), "is required");
    return as_number(j_.at(key), at(key));
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(at(key), "must be true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(at(key), "must be a string");
    return v.get<std::string>();
  }

  // Accepts [x, y] (z = fallback.z) or [x, y, z].
  Vec3 vec3(const std::string& key, const Vec3& fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_array() || v.size() < 2 || v.size() > 3) {
      throw ConfigError(at(key), "must be an array of 2 or 3 numbers");
    }
    Vec3 out = fallback;
    out.x = as_number(v[0], at(key));
    out.y = as_number(v[1], at(key));
    if (v.size() == 3) out.z = as_number(v[2], at(key));
    return out;
  }

  const nlohmann::json* child(const std::string& key) {
    if (!has(key)) return nullptr;
    return &j_.at(key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(at(it.key()), "unknown key");
    }
  }

 private:
  static double as_number(const nlohmann::json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where, "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(where, "must be finite");
    return d;
  }

  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline nlohmann::json vec_json(const Vec3& v) { return {v.x, v.y, v.z}; }

}  // namespace palmland::detail
