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


#include "palmland/dynamics.h"

#include <gtest/gtest.h>

#include <cmath>

#include "palmland/error.h"
#include "testing.h"

namespace palmland {
namespace {

using testing::Gen;

DroneParams no_drag() {
  DroneParams p;
  p.drag_coeff = 0.0;
  return p;
}

Setpoint flight_setpoint(const Vec3& goal, double yaw = 0.0) {
  Setpoint sp;
  sp.goal_position = goal;
  sp.goal_yaw = yaw;
  sp.phase = MissionPhase::kFlight;
  return sp;
}

// Closed loop at the default three rates, without the planner.
DroneState fly(DroneState s, const Setpoint& sp, double seconds,
               const ControllerConfig& cfg = {}, const DroneParams& params = {}) {
  CascadedController ctl(cfg, params);
  const double dt = 1.0 / cfg.physics_rate;
  const int ratio = static_cast<int>(std::lround(cfg.physics_rate / cfg.control_rate));
  const int steps = static_cast<int>(std::lround(seconds / dt));
  Wrench w;
  for (int i = 0; i < steps; ++i) {
    if (i % ratio == 0) w = ctl.step(s, sp);
    s = physics_step(s, w, params, dt, i * dt);
  }
  return s;
}

TEST(PidUpdateTest, Examples) {
  PidGains p;
  p.kp = {2, 2, 2};
  PidState s;
  const Vec3 out = pid_update({1, 0, 0}, s, p, 0.01);
  EXPECT_EQ(out, (Vec3{2, 0, 0}));

  PidGains all{{1, 1, 1}, {1, 1, 1}, {1, 1, 1}};
  PidState fresh;
  EXPECT_EQ(pid_update({0, 0, 0}, fresh, all, 0.01), (Vec3{0, 0, 0}));

  PidGains i;
  i.ki = {1, 1, 1};
  PidState si;
  pid_update({1, 0, 0}, si, i, 0.5);
  EXPECT_EQ(pid_update({1, 0, 0}, si, i, 0.5), (Vec3{1, 0, 0}));
}

TEST(PidUpdateTest, DerivativeIsFirstDifference) {
  PidGains d;
  d.kd = {1, 1, 1};
  PidState s;
  // No history on the first call.
  EXPECT_EQ(pid_update({1, 0, 0}, s, d, 0.1), (Vec3{0, 0, 0}));
  const Vec3 out = pid_update({1.5, -1, 0}, s, d, 0.1);
  EXPECT_NEAR(out.x, 5.0, 1e-12);
  EXPECT_NEAR(out.y, -10.0, 1e-12);
}

TEST(PidUpdateTest, AntiWindupAndOutputClamp) {
  PidGains g;
  g.ki = {1, 1, 1};
  g.integrator_limit = {0.5, 0.5, 0.5};
  PidState s;
  for (int i = 0; i < 100; ++i) pid_update({1, -1, 0}, s, g, 0.1);
  EXPECT_EQ(s.integral, (Vec3{0.5, -0.5, 0}));
  // Unwinds immediately once the error reverses.
  pid_update({-1, 1, 0}, s, g, 0.1);
  EXPECT_NEAR(s.integral.x, 0.4, 1e-12);

  PidGains p;
  p.kp = {10, 10, 10};
  p.output_limit = {1, 2, 3};
  PidState sp;
  EXPECT_EQ(pid_update({5, -5, 5}, sp, p, 0.1), (Vec3{1, -2, 3}));
}

TEST(ControlStepTest, HoverNeedsExactlyWeight) {
  const DroneParams params;
  const DroneState s = testing::hovering_at({0, 0, 1.2});
  const Wrench w = control_step(s, flight_setpoint({0, 0, 1.2}), {}, params);
  EXPECT_LT(std::abs(w.force.z - params.mass * kGravity), 1e-6);
  EXPECT_NEAR(w.force.z, 0.981, 1e-12);
  EXPECT_EQ(w.force.x, 0.0);
  EXPECT_EQ(w.force.y, 0.0);
  EXPECT_LT(w.torque.norm(), 1e-12);
}

TEST(ControlStepTest, SignChecks) {
  const DroneParams params;
  const DroneState s = testing::hovering_at({0, 0, 1.2});
  EXPECT_GT(control_step(s, flight_setpoint({0, 0, 2.2}), {}, params).force.z,
            params.mass * kGravity);
  EXPECT_LT(control_step(s, flight_setpoint({0, 0, 0.2}), {}, params).force.z,
            params.mass * kGravity);
  EXPECT_GT(control_step(s, flight_setpoint({0, 0, 1.2}, kPi / 2), {}, params).torque.z, 0.0);
  EXPECT_LT(control_step(s, flight_setpoint({0, 0, 1.2}, -kPi / 2), {}, params).torque.z, 0.0);
  // Forward goal pitches the nose down (positive pitch rotates +x thrust).
  EXPECT_GT(control_step(s, flight_setpoint({1, 0, 1.2}), {}, params).torque.y, 0.0);
  EXPECT_LT(control_step(s, flight_setpoint({0, 1, 1.2}), {}, params).torque.x, 0.0);
}

TEST(ControlStepTest, GroundedCutsThrust) {
  Setpoint sp = flight_setpoint({0, 0, 1});
  sp.phase = MissionPhase::kGrounded;
  const Wrench w = control_step(testing::hovering_at({0, 0, 0}), sp, {}, {});
  EXPECT_EQ(w.force, (Vec3{}));
  EXPECT_EQ(w.torque, (Vec3{}));
}

TEST(ControlStepTest, OutputsStayWithinActuatorLimits) {
  const DroneParams params;
  Gen gen(61);
  CascadedController ctl({}, params);
  for (int i = 0; i < 5000; ++i) {
    DroneState s;
    s.position = gen.vec3(-5, 5);
    s.velocity = gen.vec3(-3, 3);
    s.orientation = Quaternion::from_euler(gen.uniform(-0.6, 0.6), gen.uniform(-0.6, 0.6),
                                           gen.uniform(-3, 3));
    s.angular_velocity = gen.vec3(-5, 5);
    const Wrench w = ctl.step(s, flight_setpoint(gen.vec3(-5, 5), gen.uniform(-3, 3)));
    EXPECT_GE(w.force.z, 0.0);
    EXPECT_LE(w.force.z, params.max_thrust);
    EXPECT_LE(std::abs(w.torque.x), params.max_torque);
    EXPECT_LE(std::abs(w.torque.y), params.max_torque);
    EXPECT_LE(std::abs(w.torque.z), params.max_torque);
  }
}

TEST(PhysicsStepTest, FreeFall) {
  const DroneParams params = no_drag();
  DroneState s = testing::hovering_at({0, 0, 10});
  const double dt = 0.002;
  for (int i = 0; i < 250; ++i) s = physics_step(s, {}, params, dt, i * dt);
  EXPECT_NEAR(s.velocity.z, -4.905, 1e-3);
  EXPECT_NEAR(10.0 - s.position.z, 0.5 * kGravity * 0.25, 1e-3);
  EXPECT_EQ(s.position.x, 0.0);
}

TEST(PhysicsStepTest, LevelWeightThrustHoversWithinRippleEnvelope) {
  const DroneParams params = no_drag();
  DroneState s = testing::hovering_at({0, 0, 1});
  const Wrench w{{0, 0, params.mass * kGravity}, {}};
  const double dt = 0.002;
  // Ripple acceleration amplitude A at angular rate W: velocity stays within
  // 2A/W and position drifts at most (A/W) per second plus A/W^2.
  const double a = params.flap_ripple * kGravity;
  const double omega = 2 * kPi * params.flap_frequency;
  double max_dev = 0.0;
  for (int i = 0; i < 500; ++i) {
    s = physics_step(s, w, params, dt, i * dt);
    max_dev = std::max(max_dev, std::abs(s.position.z - 1.0));
    EXPECT_LE(std::abs(s.velocity.z), 2 * a / omega + 1e-6);
  }
  EXPECT_LE(max_dev, a / omega * 1.0 + a / (omega * omega) + 1e-6);
  EXPECT_EQ(s.position.x, 0.0);
  EXPECT_EQ(s.position.y, 0.0);

  // Without ripple the equilibrium is exact to rounding.
  DroneParams calm = params;
  calm.flap_ripple = 0.0;
  DroneState c = testing::hovering_at({0, 0, 1});
  for (int i = 0; i < 500; ++i) c = physics_step(c, w, calm, dt, i * dt);
  EXPECT_NEAR(c.position.z, 1.0, 1e-12);
}

TEST(PhysicsStepTest, SymmetricSpinIsConstant) {
  const DroneParams params;
  DroneState s = testing::hovering_at({0, 0, 1});
  s.angular_velocity = {0, 0, 1};
  for (int i = 0; i < 1000; ++i) s = physics_step(s, {}, params, 0.002, i * 0.002);
  EXPECT_EQ(s.angular_velocity, (Vec3{0, 0, 1}));
  EXPECT_NEAR(quaternion_yaw(s.orientation), 2.0, 1e-9);
}

TEST(PhysicsStepTest, TorqueFollowsEulersEquation) {
  const DroneParams params;
  DroneState s = testing::hovering_at({0, 0, 1});
  s.angular_velocity = {1, 2, 0};
  const Wrench w{{}, {1e-4, 0, 0}};
  const double dt = 0.002;
  const DroneState n = physics_step(s, w, params, dt, 0.0);
  // w x Iw = (1,2,0) x (1e-4, 2e-4, 0) = 0 for Ixx = Iyy, so only the torque.
  EXPECT_NEAR(n.angular_velocity.x, 1.0 + dt * 1e-4 / 1e-4, 1e-12);
  EXPECT_NEAR(n.angular_velocity.y, 2.0, 1e-12);
  // Spin about x and y couples into z through Izz - Ixx.
  s.angular_velocity = {0, 1, 1};
  const DroneState m = physics_step(s, {}, params, dt, 0.0);
  // Iw = (0, 1e-4, 2e-4); w x Iw = (1*2e-4 - 1*1e-4, 0, 0) = (1e-4, 0, 0).
  EXPECT_NEAR(m.angular_velocity.x, -dt * 1e-4 / 1e-4, 1e-12);
}

TEST(PhysicsStepTest, QuaternionNormOverAMillionSteps) {
  DroneParams params = no_drag();
  DroneState s = testing::hovering_at({0, 0, 1});
  s.angular_velocity = {0.7, -0.3, 1.9};
  double worst = 0.0;
  for (int i = 0; i < 1000000; ++i) {
    s = physics_step(s, {}, params, 0.002, i * 0.002);
    worst = std::max(worst, std::abs(s.orientation.norm() - 1.0));
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(PhysicsStepTest, NonFiniteStateDiverges) {
  DroneState s = testing::hovering_at({0, 0, 1});
  s.velocity.x = std::numeric_limits<double>::infinity();
  EXPECT_THROW(physics_step(s, {}, {}, 0.002, 0.0), SimulationDiverged);
  DroneState t = testing::hovering_at({0, 0, 1});
  EXPECT_THROW(physics_step(t, {{std::nan(""), 0, 0}, {}}, {}, 0.002, 0.0), SimulationDiverged);
}

TEST(IdealTrackingTest, Teleports) {
  DroneState s = testing::hovering_at({0.5, 0.5, 1});
  s.angular_velocity = {1, 1, 1};
  const DroneState n = ideal_tracking_step(s, flight_setpoint({1, 2, 1.2}, 0.3));
  EXPECT_EQ(n.position, (Vec3{1, 2, 1.2}));
  EXPECT_NEAR(n.velocity.x, 5.0, 1e-12);
  EXPECT_NEAR(n.velocity.z, 2.0, 1e-12);
  EXPECT_NEAR(quaternion_yaw(n.orientation), 0.3, 1e-15);
  EXPECT_EQ(n.angular_velocity, (Vec3{}));

  const DroneState still = testing::hovering_at({1, 2, 1.2}, 0.3);
  const DroneState same = ideal_tracking_step(still, flight_setpoint({1, 2, 1.2}, 0.3));
  EXPECT_EQ(same.position, still.position);
  EXPECT_EQ(same.velocity, (Vec3{}));
}

TEST(ClosedLoopTest, HoverSettlesFromOffset) {
  Gen gen(67);
  for (int trial = 0; trial < 8; ++trial) {
    const Vec3 goal{0, 0, 1.2};
    Vec3 offset = gen.vec3(-1, 1);
    offset = offset * (0.1 / offset.norm());
    const DroneState end =
        fly(testing::hovering_at(goal + offset), flight_setpoint(goal), 5.0);
    EXPECT_LT((end.position - goal).norm(), 0.05);
    EXPECT_TRUE(end.finite());
  }
}

TEST(ClosedLoopTest, TurnsToTheCommandedYaw) {
  const DroneState end =
      fly(testing::hovering_at({0, 0, 1.2}), flight_setpoint({0, 0, 1.2}, 2.0), 5.0);
  EXPECT_NEAR(quaternion_yaw(end.orientation), 2.0, 0.02);
}

TEST(ClosedLoopTest, BitIdenticalReplays) {
  const DroneState start = testing::hovering_at({0.3, -0.2, 1.0}, 0.4);
  const Setpoint sp = flight_setpoint({1.0, 1.0, 1.3}, -1.0);
  const DroneState a = fly(start, sp, 3.0);
  const DroneState b = fly(start, sp, 3.0);
  EXPECT_EQ(a.position, b.position);
  EXPECT_EQ(a.velocity, b.velocity);
  EXPECT_EQ(a.orientation, b.orientation);
  EXPECT_EQ(a.angular_velocity, b.angular_velocity);
}

TEST(ControllerConfigTest, Validate) {
  EXPECT_NO_THROW(ControllerConfig{}.validate());
  ControllerConfig c;
  c.physics_rate = 50.0;
  EXPECT_THROW(c.validate(), ConfigError);
  ControllerConfig l;
  l.position.output_limit.x = -1.0;
  EXPECT_THROW(l.validate(), ConfigError);
  DroneParams p;
  p.flap_ripple = 0.5;
  EXPECT_THROW(p.validate(), ConfigError);
  DroneParams m;
  m.mass = 0.0;
  EXPECT_THROW(m.validate(), ConfigError);
}

}  // namespace
}  // namespace palmland
