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

#include "palmland/metrics.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "palmland/csv.h"
#include "palmland/error.h"

namespace palmland {

namespace {

bool airborne(MissionPhase p) {
  return p == MissionPhase::kTakeoff || p == MissionPhase::kFlight ||
         p == MissionPhase::kLanding;
}

bool tracking(MissionPhase p) {
  return p == MissionPhase::kFlight || p == MissionPhase::kLanding;
}

Vec3 horizontal(const Vec3& v) { return {v.x, v.y, 0.0}; }

// Normalized cross-correlation of target[0, n-k) against actual[k, n).
// `dims` interleaved channels are pooled. Returns NaN for a flat window.
template <typename Get>
double ncc(std::size_t n, std::size_t k, int dims, Get get) {
  const std::size_t m = n - k;
  double num = 0.0, sxx = 0.0, syy = 0.0;
  for (int c = 0; c < dims; ++c) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      mx += get(false, i, c);
      my += get(true, i + k, c);
    }
    mx /= m;
    my /= m;
    for (std::size_t i = 0; i < m; ++i) {
      const double dx = get(false, i, c) - mx;
      const double dy = get(true, i + k, c) - my;
      num += dx * dy;
      sxx += dx * dx;
      syy += dy * dy;
    }
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return num / std::sqrt(sxx * syy);
}

template <typename Get>
double delay_search(std::size_t n, int dims, double dt, double max_lag, Get get) {
  if (!(dt > 0.0) || !(max_lag >= 0.0)) {
    throw InvalidInput("delay estimation needs dt > 0 and max_lag >= 0");
  }
  const auto max_k = static_cast<std::size_t>(std::floor(max_lag / dt + 1e-9));
  if (!(static_cast<double>(n) > 2.0 * static_cast<double>(max_k))) {
    throw InvalidInput("series too short for the requested max_lag");
  }
  // Flat inputs have no defined alignment.
  if (std::isnan(ncc(n, 0, dims, get))) {
    throw UndefinedDelay("zero-variance series");
  }
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  for (std::size_t k = 0; k <= max_k; ++k) {
    const double c = ncc(n, k, dims, get);
    if (std::isnan(c)) continue;
    if (c > best + 1e-12) {
      best = c;
      best_k = k;
    }
  }
  return static_cast<double>(best_k) * dt;
}

std::string_view gesture_field(Gesture g) { return to_string(g); }

}  // namespace

void write_run_trace(std::ostream& out, const RunTrace& trace) {
  out << kRunTraceHeader << '\n';
  for (const auto& s : trace.samples) {
    const double v[15] = {s.t,       s.position.x, s.position.y, s.position.z,
                          s.target.x, s.target.y,  s.target.z,   s.yaw,
                          s.goal_yaw, s.chest.x,   s.chest.y,    s.chest.z,
                          s.palm.x,   s.palm.y,    s.palm.z};
    for (int i = 0; i < 15; ++i) out << csv::format(v[i]) << ',';
    out << to_string(s.phase) << ',' << to_string(s.domain) << ','
        << gesture_field(s.gesture) << ',' << csv::format(s.cmd_speed) << '\n';
  }
}

RunTrace parse_run_trace(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next_line() || line != kRunTraceHeader) {
    throw ParseError(1, "expected header '" + std::string(kRunTraceHeader) + "'");
  }
  RunTrace trace;
  while (next_line()) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 19) {
      throw ParseError(lineno, "expected 19 fields, got " + std::to_string(f.size()));
    }
    double v[15];
    for (int i = 0; i < 15; ++i) v[i] = csv::parse(f[i], lineno);
    TraceSample s;
    s.t = v[0];
    s.position = {v[1], v[2], v[3]};
    s.target = {v[4], v[5], v[6]};
    s.yaw = v[7];
    s.goal_yaw = v[8];
    s.chest = {v[9], v[10], v[11]};
    s.palm = {v[12], v[13], v[14]};
    try {
      s.phase = phase_from_string(f[15]);
      s.domain = domain_from_string(f[16]);
      s.gesture = gesture_from_string(f[17]);
    } catch (const InvalidInput& e) {
      throw ParseError(lineno, e.what());
    }
    s.cmd_speed = csv::parse(f[18], lineno);
    if (!trace.samples.empty() && !(s.t > trace.samples.back().t)) {
      throw FormatError("non-monotone time at line " + std::to_string(lineno));
    }
    trace.samples.push_back(s);
  }
  if (trace.samples.size() < 2) throw FormatError("run trace needs at least 2 samples");
  const auto& smp = trace.samples;
  trace.dt = (smp.back().t - smp.front().t) / (smp.size() - 1);
  for (std::size_t i = 1; i < smp.size(); ++i) {
    if (std::abs(smp[i].t - smp[i - 1].t - trace.dt) > 0.01 * trace.dt) {
      throw FormatError("non-uniform sampling at line " + std::to_string(i + 2));
    }
  }
  return trace;
}

RunTrace load_run_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open run trace " + path.string());
  return parse_run_trace(in);
}

double rmse(std::span<const Vec3> actual, std::span<const Vec3> target) {
  if (actual.size() != target.size()) throw InvalidInput("series length mismatch");
  if (actual.empty()) throw InvalidInput("empty series");
  double sum = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const Vec3 e = actual[i] - target[i];
    sum += e.dot(e);
  }
  return std::sqrt(sum / static_cast<double>(actual.size()));
}

double estimate_delay(std::span<const double> actual,
                      std::span<const double> target, double dt, double max_lag) {
  if (actual.size() != target.size()) throw InvalidInput("series length mismatch");
  return delay_search(actual.size(), 1, dt, max_lag,
                      [&](bool is_actual, std::size_t i, int) {
                        return is_actual ? actual[i] : target[i];
                      });
}

double estimate_delay(std::span<const Vec3> actual, std::span<const Vec3> target,
                      double dt, double max_lag) {
  if (actual.size() != target.size()) throw InvalidInput("series length mismatch");
  return delay_search(actual.size(), 3, dt, max_lag,
                      [&](bool is_actual, std::size_t i, int c) {
                        const Vec3& v = is_actual ? actual[i] : target[i];
                        return c == 0 ? v.x : c == 1 ? v.y : v.z;
                      });
}

SafetyAudit safety_audit(const RunTrace& trace, const PlannerConfig& cfg) {
  SafetyAudit audit;
  const auto& smp = trace.samples;
  for (std::size_t i = 0; i < smp.size(); ++i) {
    const auto& s = smp[i];
    if (airborne(s.phase) || s.phase == MissionPhase::kLanded) {
      audit.min_chest_drone =
          std::min(audit.min_chest_drone, horizontal_distance(s.position, s.chest));
    }
    if (airborne(s.phase)) {
      const double r = horizontal_distance(s.target, s.chest);
      audit.min_setpoint_chest = std::min(audit.min_setpoint_chest, r);
      if (r < cfg.r_s) ++audit.setpoint_violations;
    }
    if (i > 0 && tracking(s.phase) && s.gesture == Gesture::kApproach &&
        tracking(smp[i - 1].phase)) {
      const double inc = horizontal_distance(s.position, s.palm) -
                         horizontal_distance(smp[i - 1].position, smp[i - 1].palm);
      audit.max_palm_increase = std::max(audit.max_palm_increase, inc);
    }
  }
  audit.smooth = audit.max_palm_increase < kSmoothStepLimit;
  return audit;
}

MetricsReport compute_report(const RunTrace& trace, const PlannerConfig& cfg,
                             const MetricsOptions& options) {
  MetricsReport r;
  const auto& smp = trace.samples;
  r.samples = smp.size();
  r.dt = trace.dt;
  r.duration = smp.empty() ? 0.0 : smp.back().t;
  r.safety = safety_audit(trace, cfg);
  if (smp.empty()) return r;

  const std::size_t window = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(options.planner_period / trace.dt)));
  auto speed_at = [&](std::size_t i, bool planar) {
    const std::size_t j = i >= window ? i - window : 0;
    if (j == i) return 0.0;
    const Vec3 d = smp[i].position - smp[j].position;
    return (planar ? std::hypot(d.x, d.y) : d.norm()) /
           (static_cast<double>(i - j) * trace.dt);
  };

  std::vector<Vec3> actual, target;
  for (const auto& s : smp) {
    if (!tracking(s.phase)) continue;
    actual.push_back(s.position);
    target.push_back(s.target);
  }
  if (!actual.empty()) {
    r.rmse = rmse(actual, target);
    if (actual.size() >= 4) {
      const double half = (static_cast<double>(actual.size()) - 1.0) * trace.dt / 2.0;
      const double max_lag = std::min(options.max_lag, half - trace.dt);
      try {
        r.delay = estimate_delay(std::span<const Vec3>(actual),
                                 std::span<const Vec3>(target), trace.dt,
                                 std::max(0.0, max_lag));
      } catch (const UndefinedDelay&) {
        r.delay.reset();
      }
    }
  }

  double d1_sum = 0.0, d1_sq = 0.0;
  int d1_n = 0;
  for (std::size_t i = 0; i < smp.size(); ++i) {
    const auto& s = smp[i];
    r.max_commanded_speed = std::max(r.max_commanded_speed, s.cmd_speed);
    if (airborne(s.phase)) {
      r.max_actual_speed = std::max(r.max_actual_speed, speed_at(i, false));
    }
    if (i > 0 && s.gesture != smp[i - 1].gesture) ++r.gesture_transitions;
    if (s.phase == MissionPhase::kFlight && s.gesture == Gesture::kApproach) {
      r.dwell[static_cast<std::size_t>(s.domain)] += trace.dt;
      if (s.domain == Domain::kFar) {
        const double v = speed_at(i, true);
        d1_sum += v;
        d1_sq += v * v;
        ++d1_n;
      }
    }
    if (!r.approach_bearing_deg && s.phase == MissionPhase::kFlight &&
        horizontal_distance(s.position, s.chest) <= cfg.r_v) {
      const Vec3 a = horizontal(s.position - s.chest);
      const Vec3 b = horizontal(s.palm - s.chest);
      if (a.norm() > 0.0 && b.norm() > 0.0) {
        const double c = std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0);
        r.approach_bearing_deg = std::acos(c) * 180.0 / kPi;
      }
    }
    if (!r.landing.success && s.phase == MissionPhase::kLanded) {
      r.landing.success = true;
      r.landing.time = s.t;
      r.landing.touchdown_speed = speed_at(i, false);
    }
  }
  if (d1_n > 0) {
    const double mean = d1_sum / d1_n;
    r.d1_speed_std = std::sqrt(std::max(0.0, d1_sq / d1_n - mean * mean));
  }

  // Behavior after each APPROACH -> STAY switch in flight.
  for (std::size_t i = 1; i < smp.size(); ++i) {
    if (!(smp[i].phase == MissionPhase::kFlight && smp[i].gesture == Gesture::kStay &&
          smp[i - 1].gesture == Gesture::kApproach)) {
      continue;
    }
    const Vec3 goal = smp[i].target;
    Vec3 dir = horizontal(smp[i].position - smp[i - 1].position);
    if (dir.norm() == 0.0) dir = horizontal(goal - smp[i].position);
    if (dir.norm() > 0.0) dir = dir / dir.norm();
    double over = 0.0;
    for (std::size_t j = i; j < smp.size() && smp[j].gesture == Gesture::kStay &&
                            smp[j].phase == MissionPhase::kFlight;
         ++j) {
      over = std::max(over, horizontal(smp[j].position - goal).dot(dir));
      if (smp[j].t - smp[i].t >= options.settle_window - 1e-9) {
        r.hold_drift = std::max(r.hold_drift, (smp[j].position - goal).norm());
      }
    }
    r.overshoots.push_back(over);
    r.overshoot = std::max(r.overshoot, over);
  }
  return r;
}

nlohmann::ordered_json report_to_json(const MetricsReport& r) {
  using nlohmann::ordered_json;
  auto opt = [](const std::optional<double>& v) -> ordered_json {
    return v ? ordered_json(*v) : ordered_json(nullptr);
  };
  auto finite_or_null = [](double v) -> ordered_json {
    return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
  };
  ordered_json j;
  j["schema"] = "palmland.report/1";
  j["scenario"] = r.scenario;
  j["mode"] = r.mode;
  j["seed"] = r.seed;
  j["samples"] = r.samples;
  j["dt_s"] = r.dt;
  j["duration_s"] = r.duration;
  j["tracking"] = {{"rmse_m", r.rmse}, {"delay_s", opt(r.delay)}};
  j["safety"] = {
      {"min_chest_drone_m", finite_or_null(r.safety.min_chest_drone)},
      {"min_setpoint_chest_m", finite_or_null(r.safety.min_setpoint_chest)},
      {"setpoint_violations", r.safety.setpoint_violations},
      {"max_palm_distance_increase_m", r.safety.max_palm_increase},
      {"smooth", r.safety.smooth},
  };
  j["speed"] = {{"max_commanded_mps", r.max_commanded_speed},
                {"max_actual_mps", r.max_actual_speed},
                {"d1_speed_std_mps", r.d1_speed_std}};
  j["switching"] = {{"transitions", r.gesture_transitions},
                    {"overshoot_m", r.overshoot},
                    {"overshoots_m", r.overshoots},
                    {"hold_drift_m", r.hold_drift}};
  j["landing"] = {{"success", r.landing.success},
                  {"time_s", opt(r.landing.time)},
                  {"touchdown_speed_mps", opt(r.landing.touchdown_speed)}};
  ordered_json dwell;
  for (auto d : {Domain::kFar, Domain::kWeber, Domain::kArc, Domain::kHold}) {
    dwell[std::string(to_string(d))] = r.dwell[static_cast<std::size_t>(d)];
  }
  j["dwell_s"] = dwell;
  j["approach_bearing_deg"] = opt(r.approach_bearing_deg);
  j["reference"] = {{"rmse_m", r.reference.rmse},
                    {"delay_s", r.reference.delay},
                    {"min_chest_drone_m", r.reference.min_chest_drone}};
  return j;
}

}  // namespace palmland
