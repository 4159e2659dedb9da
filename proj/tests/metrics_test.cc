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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "palmland/error.h"
#include "testing.h"

namespace palmland {
namespace {

using testing::Gen;

// Random band-limited signal: a few sines below 2 Hz.
struct Signal {
  explicit Signal(Gen& gen) {
    for (int i = 0; i < 4; ++i) {
      amp.push_back(gen.uniform(0.1, 1.0));
      freq.push_back(gen.uniform(0.1, 2.0));
      phase.push_back(gen.uniform(0.0, 2 * kPi));
    }
  }
  double operator()(double t) const {
    double v = 0.0;
    for (std::size_t i = 0; i < amp.size(); ++i) {
      v += amp[i] * std::sin(2 * kPi * freq[i] * t + phase[i]);
    }
    return v;
  }
  std::vector<double> amp, freq, phase;
};

TEST(RmseTest, Examples) {
  const std::vector<Vec3> a{{0, 0, 0}, {1, 2, 3}};
  EXPECT_EQ(rmse(a, a), 0.0);
  const std::vector<Vec3> t{{0.1, 0, 0}, {1.1, 2, 3}};
  EXPECT_NEAR(rmse(a, t), 0.1, 1e-12);
  const std::vector<Vec3> zero{{0, 0, 0}, {0, 0, 0}};
  const std::vector<Vec3> off{{0.3, 0, 0}, {0.4, 0, 0}};
  EXPECT_NEAR(rmse(off, zero), 0.35355, 1e-5);
  EXPECT_NEAR(rmse(off, zero), std::sqrt(0.125), 1e-15);
}

TEST(RmseTest, Errors) {
  const std::vector<Vec3> one{{0, 0, 0}};
  const std::vector<Vec3> two{{0, 0, 0}, {0, 0, 0}};
  EXPECT_THROW(rmse(one, two), InvalidInput);
  EXPECT_THROW(rmse(std::span<const Vec3>(), std::span<const Vec3>()), InvalidInput);
}

TEST(RmseTest, TranslationInvariantAndZeroIffIdentical) {
  Gen gen(83);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = static_cast<int>(gen.integer(1, 50));
    std::vector<Vec3> a, b, as, bs;
    const Vec3 shift = gen.vec3(-10, 10);
    for (int i = 0; i < n; ++i) {
      a.push_back(gen.vec3(-1, 1));
      b.push_back(gen.vec3(-1, 1));
      as.push_back(a.back() + shift);
      bs.push_back(b.back() + shift);
    }
    EXPECT_NEAR(rmse(a, b), rmse(as, bs), 1e-9);
    EXPECT_EQ(rmse(a, a), 0.0);
    EXPECT_GT(rmse(a, b), 0.0);
  }
}

TEST(DelayTest, Examples) {
  std::vector<double> target, actual;
  for (int i = 0; i < 400; ++i) {
    target.push_back(std::sin(0.05 * i) + 0.3 * std::cos(0.13 * i));
  }
  for (int i = 0; i < 400; ++i) actual.push_back(target[std::max(0, i - 10)]);
  EXPECT_NEAR(estimate_delay(actual, target, 0.01, 1.0), 0.10, 1e-12);
  EXPECT_EQ(estimate_delay(target, target, 0.01, 1.0), 0.0);

  // Quarter period of a 1 Hz sine sampled at 100 Hz.
  std::vector<double> s, q;
  for (int i = 0; i < 600; ++i) {
    s.push_back(std::sin(2 * kPi * i * 0.01));
    q.push_back(std::sin(2 * kPi * (i * 0.01 - 0.25)));
  }
  EXPECT_NEAR(estimate_delay(q, s, 0.01, 0.5), 0.25, 1e-12);
}

TEST(DelayTest, Errors) {
  const std::vector<double> flat(100, 1.0);
  std::vector<double> ramp;
  for (int i = 0; i < 100; ++i) ramp.push_back(i);
  EXPECT_THROW(estimate_delay(flat, flat, 0.01, 0.2), UndefinedDelay);
  EXPECT_THROW(estimate_delay(ramp, flat, 0.01, 0.2), UndefinedDelay);
  // Needs more than 2 * max_lag / dt samples.
  EXPECT_THROW(estimate_delay(ramp, ramp, 0.01, 0.5), InvalidInput);
  EXPECT_NO_THROW(estimate_delay(ramp, ramp, 0.01, 0.49));
  EXPECT_THROW(estimate_delay(ramp, ramp, 0.0, 0.1), InvalidInput);
  const std::vector<double> shorter(99, 0.0);
  EXPECT_THROW(estimate_delay(ramp, shorter, 0.01, 0.1), InvalidInput);
}

TEST(DelayTest, RecoversExactShifts) {
  Gen gen(89);
  const double dt = 0.01;
  for (int trial = 0; trial < 60; ++trial) {
    const Signal sig(gen);
    const int k = static_cast<int>(gen.integer(0, 100));
    const int n = 1000;
    std::vector<double> target, actual;
    for (int i = 0; i < n; ++i) {
      target.push_back(sig(i * dt));
      actual.push_back(sig((i - k) * dt));
    }
    EXPECT_EQ(estimate_delay(actual, target, dt, 1.0), k * dt) << "k=" << k;
  }
}

TEST(DelayTest, VectorSeriesPoolsAxes) {
  Gen gen(97);
  const Signal sx(gen), sy(gen);
  std::vector<Vec3> target, actual;
  for (int i = 0; i < 800; ++i) {
    target.push_back({sx(i * 0.01), sy(i * 0.01), 1.2});
    actual.push_back({sx((i - 37) * 0.01), sy((i - 37) * 0.01), 1.2});
  }
  EXPECT_NEAR(estimate_delay(std::span<const Vec3>(actual), std::span<const Vec3>(target),
                             0.01, 2.0),
              0.37, 1e-12);
}

TraceSample flying(double t, const Vec3& pos, const Vec3& target) {
  TraceSample s;
  s.t = t;
  s.position = pos;
  s.target = target;
  s.chest = {0, 0, 1.25};
  s.palm = {0.7, 0, 1.1};
  s.phase = MissionPhase::kFlight;
  s.gesture = Gesture::kApproach;
  return s;
}

TEST(SafetyAuditTest, Examples) {
  RunTrace clean;
  for (int i = 0; i < 10; ++i) {
    clean.samples.push_back(flying(i * 0.01, {2.0 - 0.01 * i, 0, 1.2}, {2.0 - 0.01 * i, 0, 1.2}));
  }
  const SafetyAudit a = safety_audit(clean, {});
  EXPECT_EQ(a.setpoint_violations, 0);
  EXPECT_NEAR(a.min_chest_drone, 1.91, 1e-12);
  EXPECT_NEAR(a.min_setpoint_chest, 1.91, 1e-12);
  EXPECT_TRUE(a.smooth);

  RunTrace bad = clean;
  bad.samples[4].target = {0.2, 0, 1.2};
  EXPECT_EQ(safety_audit(bad, {}).setpoint_violations, 1);
  EXPECT_NEAR(safety_audit(bad, {}).min_setpoint_chest, 0.2, 1e-12);

  // Grounded samples are not audited.
  RunTrace parked = clean;
  parked.samples[4].phase = MissionPhase::kGrounded;
  parked.samples[4].target = {0.0, 0, 0};
  EXPECT_EQ(safety_audit(parked, {}).setpoint_violations, 0);
}

TEST(SafetyAuditTest, SmoothnessThreshold) {
  RunTrace t;
  t.samples.push_back(flying(0.0, {2, 0, 1.2}, {2, 0, 1.2}));
  t.samples.push_back(flying(0.01, {2.019, 0, 1.2}, {2, 0, 1.2}));
  EXPECT_TRUE(safety_audit(t, {}).smooth);
  t.samples.push_back(flying(0.02, {2.045, 0, 1.2}, {2, 0, 1.2}));
  const SafetyAudit a = safety_audit(t, {});
  EXPECT_NEAR(a.max_palm_increase, 0.026, 1e-12);
  EXPECT_FALSE(a.smooth);
}

RunTrace synthetic_run() {
  RunTrace t;
  t.dt = 0.01;
  for (int i = 0; i < 300; ++i) {
    const double time = i * 0.01;
    // Target stops at i = 200; the drone trails 5 samples and stops 0.01 late.
    TraceSample s = flying(time, {2.0 - 0.002 * std::clamp(i - 5, 0, 205), 0, 1.2},
                           {2.0 - 0.002 * std::min(i, 200), 0, 1.2});
    s.yaw = kPi;
    s.goal_yaw = kPi;
    s.domain = Domain::kFar;
    s.cmd_speed = 0.2;
    if (i >= 200) s.gesture = Gesture::kStay;
    if (i == 299) s.phase = MissionPhase::kLanded;
    t.samples.push_back(s);
  }
  return t;
}

TEST(RunTraceTest, CsvRoundTrip) {
  const RunTrace t = synthetic_run();
  std::ostringstream out;
  write_run_trace(out, t);
  std::istringstream in(out.str());
  const RunTrace back = parse_run_trace(in);
  ASSERT_EQ(back.samples.size(), t.samples.size());
  EXPECT_NEAR(back.dt, 0.01, 1e-12);
  for (std::size_t i = 0; i < t.samples.size(); ++i) {
    EXPECT_EQ(back.samples[i].t, t.samples[i].t);
    EXPECT_EQ(back.samples[i].position, t.samples[i].position);
    EXPECT_EQ(back.samples[i].target, t.samples[i].target);
    EXPECT_EQ(back.samples[i].phase, t.samples[i].phase);
    EXPECT_EQ(back.samples[i].gesture, t.samples[i].gesture);
    EXPECT_EQ(back.samples[i].domain, t.samples[i].domain);
    EXPECT_EQ(back.samples[i].cmd_speed, t.samples[i].cmd_speed);
  }
  std::ostringstream again;
  write_run_trace(again, back);
  EXPECT_EQ(again.str(), out.str());
}

TEST(RunTraceTest, ParseErrors) {
  std::ostringstream out;
  write_run_trace(out, synthetic_run());
  std::string text = out.str();
  const auto bad_phase = [&] {
    std::string s = text;
    const auto pos = s.find("FLIGHT");
    s.replace(pos, 6, "CRUISE");
    return s;
  }();
  std::istringstream a(bad_phase);
  try {
    parse_run_trace(a);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  std::istringstream b("t,x\n");
  EXPECT_THROW(parse_run_trace(b), ParseError);
  std::istringstream c(std::string(kRunTraceHeader) + "\n");
  EXPECT_THROW(parse_run_trace(c), FormatError);
}

TEST(ReportTest, ComputesSyntheticQuantities) {
  const MetricsReport r = compute_report(synthetic_run(), {});
  ASSERT_TRUE(r.delay.has_value());
  // Clipped ramps bias the peak, so only the sign of the lag is exact here.
  EXPECT_GT(*r.delay, 0.0);
  EXPECT_GT(r.rmse, 0.0);
  EXPECT_EQ(r.gesture_transitions, 1);
  EXPECT_EQ(r.safety.setpoint_violations, 0);
  EXPECT_TRUE(r.landing.success);
  EXPECT_NEAR(*r.landing.time, 2.99, 1e-12);
  EXPECT_NEAR(r.max_commanded_speed, 0.2, 1e-12);
  EXPECT_NEAR(r.dwell[static_cast<std::size_t>(Domain::kFar)], 2.0, 1e-9);
  // The drone keeps sliding 5 samples past the frozen goal.
  EXPECT_NEAR(r.overshoot, 0.01, 1e-9);
}

TEST(ReportTest, JsonKeys) {
  MetricsReport r = compute_report(synthetic_run(), {});
  r.scenario = "synthetic";
  r.mode = "dynamic";
  const auto j = report_to_json(r);
  for (const char* key : {"schema", "scenario", "mode", "seed", "samples", "dt_s",
                          "duration_s", "tracking", "safety", "speed", "switching",
                          "landing", "dwell_s", "approach_bearing_deg", "reference"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["reference"]["min_chest_drone_m"], 0.693);
  EXPECT_EQ(j["reference"]["rmse_m"], 0.1695);
  EXPECT_EQ(j["reference"]["delay_s"], 1.0);
  EXPECT_EQ(j["safety"]["setpoint_violations"], 0);
  EXPECT_TRUE(j["dwell_s"].contains("D1_FAR"));
}

TEST(ReportTest, NonNegativeQuantities) {
  Gen gen(101);
  for (int trial = 0; trial < 30; ++trial) {
    RunTrace t;
    for (int i = 0; i < 200; ++i) {
      TraceSample s = flying(i * 0.01, gen.vec3(-3, 3), gen.vec3(-3, 3));
      s.gesture = gen.coin() ? Gesture::kApproach : Gesture::kStay;
      s.cmd_speed = gen.uniform(0, 0.1);
      t.samples.push_back(s);
    }
    const MetricsReport r = compute_report(t, {});
    EXPECT_GE(r.rmse, 0.0);
    if (r.delay) {
      EXPECT_GE(*r.delay, 0.0);
    }
    EXPECT_GE(r.safety.min_chest_drone, 0.0);
    EXPECT_GE(r.max_actual_speed, 0.0);
    EXPECT_GE(r.overshoot, 0.0);
    EXPECT_GE(r.hold_drift, 0.0);
    for (double d : r.dwell) EXPECT_GE(d, 0.0);
  }
}

}  // namespace
}  // namespace palmland
