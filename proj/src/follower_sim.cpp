// Copyright 2026 The Teleop Authors
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

#include "teleop/follower_sim.hpp"

#include <algorithm>
#include <cmath>

namespace teleop {

namespace {
constexpr double kQuinticPeak = 1.875;
}

double quintic(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

ActuatorConfig ActuatorConfig::from_model(const RobotModel& model, double factor) {
  ActuatorConfig a;
  for (const auto& limb : model.limbs) a.velocity_limits.push_back(factor * limb.velocity_limits());
  return a;
}

FollowerSim::FollowerSim(std::shared_ptr<const RobotModel> model, ActuatorConfig actuator, std::vector<JointVector> q_init)
    : model_(std::move(model)), actuator_(std::move(actuator)) {
  const std::size_t n = model_->limbs.size();
  if (actuator_.velocity_limits.empty()) actuator_.velocity_limits = ActuatorConfig::from_model(*model_).velocity_limits;
  if (actuator_.velocity_limits.size() != n) throw ConfigError("actuator: velocity limits needed for every limb");
  if (!(actuator_.gripper_tau > 0.0)) throw ConfigError("actuator: gripper time constant must be positive");
  if (q_init.size() != n) throw DimensionError("follower: initial configuration needs every limb");
  for (std::size_t l = 0; l < n; ++l) {
    const auto& chain = model_->limbs[l];
    if (actuator_.velocity_limits[l].size() != static_cast<Eigen::Index>(chain.dof()) ||
        !(actuator_.velocity_limits[l].array() > 0.0).all()) {
      throw ConfigError("actuator: bad velocity limits for limb '" + chain.name + "'");
    }
    if (q_init[l].size() != static_cast<Eigen::Index>(chain.dof())) {
      throw DimensionError("follower: initial configuration of '" + chain.name + "' has wrong length");
    }
    if (!chain.within_limits(q_init[l])) throw Error("follower: initial configuration of '" + chain.name + "' outside limits");
  }
  state_.gripper_actual.assign(n, 0.0);
  obstacle_.assign(n, std::nullopt);
  set_q(q_init);
  state_.T_cmd_last = state_.T_actual;
}

void FollowerSim::set_q(const std::vector<JointVector>& q) {
  state_.q_actual = q;
  state_.T_actual.resize(q.size());
  for (std::size_t l = 0; l < q.size(); ++l) state_.T_actual[l] = forward_kinematics(model_->limbs[l], q[l]);
}

const FollowerState& FollowerSim::step(const ControlSignal& signal, double dt) {
  const std::size_t n = model_->limbs.size();
  if (signal.q_cmd.size() != n) throw DimensionError("follower step: control signal has wrong limb count");
  std::vector<JointVector> q(n);
  for (std::size_t l = 0; l < n; ++l) {
    const auto& chain = model_->limbs[l];
    if (signal.q_cmd[l].size() != static_cast<Eigen::Index>(chain.dof())) {
      throw DimensionError("follower step: q_cmd of '" + chain.name + "' has wrong length");
    }
    const JointVector max_step = actuator_.velocity_limits[l] * dt;
    q[l] = chain.clamp(state_.q_actual[l] + (signal.q_cmd[l] - state_.q_actual[l]).cwiseMax(-max_step).cwiseMin(max_step));
  }
  set_q(q);
  const double alpha = 1.0 - std::exp(-dt / actuator_.gripper_tau);
  for (std::size_t l = 0; l < n && l < signal.gripper_cmd.size(); ++l) {
    state_.gripper_actual[l] += alpha * (signal.gripper_cmd[l] - state_.gripper_actual[l]);
    if (obstacle_[l]) state_.gripper_actual[l] = std::min(state_.gripper_actual[l], *obstacle_[l]);
  }
  if (signal.T_cmd.size() == n) state_.T_cmd_last = signal.T_cmd;
  state_.timestamp = signal.timestamp;
  return state_;
}

void FollowerSim::set_gripper_obstacle(std::size_t limb, std::optional<double> closure) {
  obstacle_.at(limb) = closure;
}

double FollowerSim::minimum_duration(const std::vector<JointVector>& q_target) const {
  double t = 0.0;
  for (std::size_t l = 0; l < q_target.size(); ++l) {
    const JointVector ratio = (q_target[l] - state_.q_actual[l]).cwiseAbs().cwiseQuotient(actuator_.velocity_limits[l]);
    if (ratio.size() > 0) t = std::max(t, kQuinticPeak * ratio.maxCoeff());
  }
  return t;
}

MoveResult FollowerSim::move_to(const std::vector<JointVector>& q_target, double duration, double dt, double t_start,
                                const MoveHooks& hooks) {
  const std::size_t n = model_->limbs.size();
  if (q_target.size() != n) throw DimensionError("move_to: target has wrong limb count");
  if (!(dt > 0.0)) throw Error("move_to: dt must be positive");
  for (std::size_t l = 0; l < n; ++l) {
    const auto& chain = model_->limbs[l];
    if (q_target[l].size() != static_cast<Eigen::Index>(chain.dof())) {
      throw DimensionError("move_to: target of '" + chain.name + "' has wrong length");
    }
    if (!q_target[l].allFinite() || !chain.within_limits(q_target[l])) {
      throw Error("move_to: target of '" + chain.name + "' outside joint limits");
    }
  }
  MoveResult result;
  bool at_target = true;
  for (std::size_t l = 0; l < n; ++l) at_target = at_target && q_target[l] == state_.q_actual[l];
  if (at_target) return result;

  const double needed = std::max(duration, minimum_duration(q_target));
  const int steps = std::max(1, static_cast<int>(std::ceil(needed / dt - 1e-9)));
  const double total = steps * dt;
  const std::vector<JointVector> q0 = state_.q_actual;
  std::vector<JointVector> q(n);
  for (int k = 1; k <= steps; ++k) {
    const double s = k == steps ? 1.0 : quintic(k * dt / total);
    for (std::size_t l = 0; l < n; ++l) {
      q[l] = k == steps ? q_target[l] : model_->limbs[l].clamp(q0[l] + s * (q_target[l] - q0[l]));
    }
    if (hooks.collides && hooks.collides(q)) {
      throw MoveAborted("move_to: collision predicted at step " + std::to_string(k) + " of " + std::to_string(steps));
    }
    set_q(q);
    state_.T_cmd_last = state_.T_actual;
    state_.timestamp = t_start + k * dt;
    ++result.steps;
    if (hooks.on_step) hooks.on_step(state_);
  }
  result.duration = total;
  return result;
}

}  // namespace teleop
