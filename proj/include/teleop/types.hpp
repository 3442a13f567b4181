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

// Values exchanged between the leader, teleoperation, follower and feedback modules.

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "teleop/robot_model.hpp"
#include "teleop/se3.hpp"

namespace teleop {

enum class PayloadKind { kJointPositions, kEefDelta };

std::string_view to_string(PayloadKind kind);

struct JointPositions {
  JointVector q;
};

/// Scaled pose delta relative to the leader's session-start pose.
struct EefDelta {
  Pose delta;
};

struct LimbCommand {
  /// Follower limb this payload drives.
  std::string limb;
  std::variant<JointPositions, EefDelta> payload;
  /// Normalized gripper closure in [0, 1].
  double gripper = 0.0;

  PayloadKind kind() const {
    return std::holds_alternative<JointPositions>(payload) ? PayloadKind::kJointPositions : PayloadKind::kEefDelta;
  }
};

struct LeaderCommand {
  std::vector<LimbCommand> limbs;
  bool start_requested = false;
  bool end_requested = false;
  double timestamp = 0.0;

  const LimbCommand* find(std::string_view limb) const;
};

struct LimbFlags {
  bool limit_clamped = false;
  bool velocity_clamped = false;
  bool collision_hold = false;
  bool ik_converged = true;
};

/// Output of the safety filter: what the follower is allowed to execute.
struct ControlSignal {
  std::vector<JointVector> q_cmd;
  std::vector<double> gripper_cmd;
  /// Target EEF pose before IK (limb base frame).
  std::vector<Pose> T_cmd;
  std::vector<LimbFlags> flags;
  double timestamp = 0.0;
};

struct FollowerState {
  std::vector<JointVector> q_actual;
  std::vector<double> gripper_actual;
  std::vector<Pose> T_actual;
  std::vector<Pose> T_cmd_last;
  double timestamp = 0.0;
};

/// Torques for one leader limb. Vectors are empty for leaders without joints.
struct LimbFeedback {
  std::string limb;  // follower limb
  JointVector bias;
  JointVector tracking;
  double gripper = 0.0;
  /// log(T_actual^{-1} T_cmd) used for the task-space term.
  Vector6d task_error = Vector6d::Zero();
  bool stale = false;
};

struct FeedbackTorques {
  std::vector<LimbFeedback> limbs;
  double timestamp = 0.0;
  std::uint64_t sequence = 0;
};

}  // namespace teleop
