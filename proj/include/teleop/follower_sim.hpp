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

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "teleop/robot_model.hpp"
#include "teleop/types.hpp"

namespace teleop {

struct ActuatorConfig {
  /// Per limb, per joint. Empty means twice the URDF velocity limits.
  std::vector<JointVector> velocity_limits;
  /// Gripper first-order lag time constant (s).
  double gripper_tau = 0.1;

  static ActuatorConfig from_model(const RobotModel& model, double factor = 2.0);
};

/// Raised by move_to when the interpolated path enters a collision. The follower stays at
/// the last collision-free configuration.
class MoveAborted : public Error {
 public:
  explicit MoveAborted(const std::string& what) : Error(what) {}
};

struct MoveHooks {
  /// Returns true when a configuration must not be entered.
  std::function<bool(const std::vector<JointVector>&)> collides;
  /// Called after every interpolation step with the new state.
  std::function<void(const FollowerState&)> on_step;
};

struct MoveResult {
  int steps = 0;
  double duration = 0.0;
};

/// Kinematic position-tracking follower.
class FollowerSim {
 public:
  FollowerSim(std::shared_ptr<const RobotModel> model, ActuatorConfig actuator, std::vector<JointVector> q_init);

  /// Moves every joint toward q_cmd by at most its actuator limit times dt; the gripper
  /// follows gripper_cmd with a first-order lag. The state is stamped with signal.timestamp.
  const FollowerState& step(const ControlSignal& signal, double dt);

  /// Quintic time-scaled move over max(duration, minimum), where the minimum keeps the peak
  /// joint speed (1.875 |dq| / T) within the actuator limits. Blocks until done.
  MoveResult move_to(const std::vector<JointVector>& q_target, double duration, double dt, double t_start,
                     const MoveHooks& hooks = {});

  /// Shortest quintic move duration from the current state to q_target.
  double minimum_duration(const std::vector<JointVector>& q_target) const;
  /// An object held by a gripper stops its closure at `closure`; nullopt removes it.
  void set_gripper_obstacle(std::size_t limb, std::optional<double> closure);

  const FollowerState& state() const { return state_; }
  const RobotModel& model() const { return *model_; }
  const ActuatorConfig& actuator() const { return actuator_; }

 private:
  void set_q(const std::vector<JointVector>& q);

  std::shared_ptr<const RobotModel> model_;
  ActuatorConfig actuator_;
  FollowerState state_;
  std::vector<std::optional<double>> obstacle_;
};

/// Quintic time scaling 10s^3 - 15s^4 + 6s^5 on [0, 1].
double quintic(double s);

}  // namespace teleop
