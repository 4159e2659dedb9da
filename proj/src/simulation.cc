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

#include "palmland/simulation.h"

#include <cmath>
#include <fstream>

#include "palmland/error.h"

namespace palmland {

namespace {

// Tick-boundary times are formed from integer counters so every run visits
// exactly the same instants.
constexpr double kEventSlack = 1e-9;

DroneState initial_drone(const Pose& pose) {
  DroneState d;
  d.position = pose.position;
  d.orientation = pose.orientation.normalized();
  return d;
}

}  // namespace

Simulation::Simulation(const RunConfig& cfg, const Pose& drone_init,
                       UserProvider user)
    : cfg_(cfg),
      drone_init_(drone_init),
      user_provider_(std::move(user)),
      planner_(cfg.planner),
      controller_(cfg.controller, cfg.drone),
      physics_dt_(1.0 / cfg.controller.physics_rate),
      drone_(initial_drone(drone_init)) {
  cfg_.gesture.validate();
  physics_per_control_ = static_cast<std::uint64_t>(
      std::llround(cfg.controller.physics_rate / cfg.controller.control_rate));
  physics_per_planner_ = physics_per_control_ *
                         static_cast<std::uint64_t>(std::llround(
                             cfg.planner.delta_t * cfg.controller.control_rate));
  trace_.dt = 1.0 / cfg.controller.control_rate;
  user_ = user_provider_(0.0);
  setpoint_.goal_position = drone_.position;
  setpoint_.goal_yaw = quaternion_yaw(drone_.orientation);
}

double Simulation::time() const {
  return static_cast<double>(tick_) * physics_dt_;
}

void Simulation::defer(std::function<void(Simulation&)> action) {
  deferred_.push_back(std::move(action));
}

void Simulation::request_takeoff() {
  if (planner_.phase() == MissionPhase::kGrounded) planner_.request_takeoff();
}

void Simulation::reset() {
  planner_.reset();
  controller_.reset();
  drone_ = initial_drone(drone_init_);
  gesture_ = GestureState{Gesture::kStay, time(), std::nullopt};
  wrench_ = {};
}

void Simulation::force_stay() {
  gesture_ = GestureState{Gesture::kStay, time(), std::nullopt};
}

void Simulation::set_planner_config(const PlannerConfig& cfg) {
  planner_.set_config(cfg);
  cfg_.planner = cfg;
}

void Simulation::set_gesture_config(const GestureConfig& cfg) {
  cfg.validate();
  cfg_.gesture = cfg;
}

void Simulation::step() {
  const double t = time();
  const bool planner_due = tick_ % physics_per_planner_ == 0;
  if (planner_due) planner_tick(t);
  if (tick_ % physics_per_control_ == 0) {
    control_tick(t);
    record(t, planner_due);
  }

  const MissionPhase phase = planner_.phase();
  if (phase == MissionPhase::kLanded) {
    // Perched: the drone rides on the palm.
    drone_.position = user_.palm.position + landed_offset_;
    drone_.velocity = {};
    drone_.angular_velocity = {};
  } else if (cfg_.mode == TrackingMode::kDynamic) {
    drone_ = physics_step(drone_, wrench_, cfg_.drone, physics_dt_, t);
    if (drone_.position.z < 0.0) {
      // Ground contact: no penetration, no sliding, settle level.
      drone_.position.z = 0.0;
      if (drone_.velocity.z < 0.0) drone_.velocity = {};
      drone_.angular_velocity = {};
      drone_.orientation = Quaternion::from_yaw(quaternion_yaw(drone_.orientation));
    }
  }
  ++tick_;
}

void Simulation::planner_tick(double t) {
  auto pending = std::move(deferred_);
  deferred_.clear();
  for (auto& action : pending) action(*this);

  user_ = user_provider_(t);
  gesture_ = classify(chest_hand_distance(user_), gesture_, t, cfg_.gesture);

  const MissionPhase before = planner_.phase();
  WorldState world{t, user_, drone_, planner_.status(), setpoint_};
  setpoint_ = planner_.step(world, gesture_);
  if (before != MissionPhase::kLanded && planner_.phase() == MissionPhase::kLanded) {
    landed_offset_ = drone_.position - user_.palm.position;
  }
  if (cfg_.mode == TrackingMode::kIdeal &&
      setpoint_.phase != MissionPhase::kGrounded &&
      setpoint_.phase != MissionPhase::kLanded) {
    drone_ = ideal_tracking_step(drone_, setpoint_, cfg_.planner.delta_t);
  }
}

void Simulation::control_tick(double) {
  if (cfg_.mode == TrackingMode::kDynamic) {
    wrench_ = controller_.step(drone_, setpoint_);
  }
}

void Simulation::record(double t, bool planner_tick) {
  TraceSample s;
  s.t = t;
  s.position = drone_.position;
  s.target = setpoint_.goal_position;
  s.yaw = quaternion_yaw(drone_.orientation.normalized());
  s.goal_yaw = setpoint_.goal_yaw;
  s.chest = user_.chest.position;
  s.palm = user_.palm.position;
  s.phase = planner_.phase();
  s.domain = planner_.status().domain;
  s.gesture = gesture_.current;
  s.cmd_speed = setpoint_.commanded_speed;
  s.d_palm = planner_.status().d_palm;
  s.r_chest = planner_.status().r_chest;
  s.k_prime = planner_.status().k_prime;
  s.planner_tick = planner_tick;
  trace_.samples.push_back(s);
}

RunResult run(const RunConfig& input) {
  input.validate();
  RunConfig cfg = input;

  std::optional<Scenario> scenario;
  std::optional<UserTrace> user_trace;
  std::vector<double> takeoffs;
  Pose drone_init;
  double duration = 0.0;
  UserProvider provider;
  std::string name;

  if (!cfg.scenario.empty()) {
    scenario = resolve_scenario(cfg.scenario);
    if (cfg.seed) scenario->seed = *cfg.seed;
    duration = scenario->duration;
    drone_init = scenario->drone_init;
    for (const auto& e : scenario->events) {
      if (e.type == EventType::kTakeoff) takeoffs.push_back(e.t);
    }
    const Scenario* s = &*scenario;
    provider = [s](double t) { return sample_user(*s, std::min(t, s->duration)); };
    name = scenario->name;
  } else {
    user_trace = load_trace(cfg.trace);
    duration = user_trace->duration();
    drone_init = cfg.trace_drone;
    takeoffs.push_back(cfg.trace_takeoff_t);
    const UserTrace* tr = &*user_trace;
    const UserModel geometry = cfg.trace_user;
    const double t0 = tr->samples.front().t;
    provider = [tr, geometry, t0](double t) { return sample_trace(*tr, geometry, t0 + t); };
    name = std::filesystem::path(cfg.trace).stem().string();
  }
  if (cfg.duration_override) duration = *cfg.duration_override;

  Simulation sim(cfg, drone_init, provider);
  std::size_t next_takeoff = 0;
  while (sim.time() <= duration + kEventSlack) {
    const bool at_planner = sim.ticks() % static_cast<std::uint64_t>(std::llround(
                                cfg.planner.delta_t / sim.physics_dt())) == 0;
    if (at_planner) {
      while (next_takeoff < takeoffs.size() &&
             takeoffs[next_takeoff] <= sim.time() + kEventSlack) {
        sim.defer([](Simulation& s) { s.request_takeoff(); });
        ++next_takeoff;
      }
    }
    sim.step();
    if (sim.phase() == MissionPhase::kLanded) break;
  }

  RunResult result;
  result.trace = sim.trace();
  result.report = compute_report(result.trace, cfg.planner, cfg.metrics);
  result.report.scenario = name;
  result.report.mode = std::string(to_string(cfg.mode));
  result.report.seed = scenario ? scenario->seed : cfg.seed.value_or(0);
  return result;
}

void write_outputs(const RunResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "trace.csv", std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / "trace.csv").string());
    write_run_trace(out, result.trace);
  }
  std::ofstream out(dir / "report.json", std::ios::binary);
  if (!out) throw Error("cannot write " + (dir / "report.json").string());
  out << report_to_json(result.report).dump(2) << '\n';
}

int exit_status(const MetricsReport& report) {
  return report.safety.setpoint_violations == 0 ? 0 : 1;
}

}  // namespace palmland
