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

#include <memory>
#include <vector>

#include "teleop/ik_solver.hpp"
#include "teleop/kernels.hpp"
#include "teleop/leader.hpp"
#include "teleop/robot_model.hpp"
#include "teleop/types.hpp"

namespace teleop {

struct SafetyConfig {
  double dt = 0.02;
  /// Per limb, per joint (rad/s or m/s).
  std::vector<JointVector> velocity_limits;
  double collision_margin = 0.0;
  /// Sphere pairs to test, indices into kernels::place_spheres() output.
  std::vector<kernels::SpherePair> collision_pairs;
  /// Use the OpenMP kernels for collision checks and multi-limb IK.
  bool parallel = false;

  /// Velocity limits from the URDF and every non-adjacent sphere pair of the model.
  static SafetyConfig from_model(const RobotModel& model, double dt, double margin = 0.0);
  void validate(const RobotModel& model) const;
};

struct CollisionPair {
  int limb_a = 0;
  int sphere_a = 0;
  int limb_b = 0;
  int sphere_b = 0;
  double distance = 0.0;  // between centers
};

/// Configured sphere pairs closer than r_a + r_b + margin at configuration q.
std::vector<CollisionPair> check_self_collision(const RobotModel& model, const std::vector<JointVector>& q,
                                                const SafetyConfig& cfg);

/// Joint-limit clamp, then per-joint rate clamp against prev, then collision hold: every limb
/// in a colliding pair keeps prev. Fills q_cmd and flags only.
ControlSignal safety_filter(const std::vector<JointVector>& targets, const std::vector<JointVector>& prev,
                            const RobotModel& model, const SafetyConfig& cfg);

struct JointTargets {
  std::vector<JointVector> q;
  std::vector<Pose> T_cmd;
  std::vector<double> gripper;
  std::vector<bool> ik_converged;
};

/// Leader command interpretation and safety filtering for one follower model.
class TeleopPipeline {
 public:
  TeleopPipeline(std::shared_ptr<const RobotModel> model, std::vector<IKConfig> ik, SafetyConfig safety);

  /// Rejects leaders whose joint payloads do not fit the follower limb they drive.
  void check_leader(const std::vector<LeaderLimbInfo>& info) const;

  /// Stores the follower EEF poses that EEF deltas are applied to.
  void capture_initial(const FollowerState& state);
  const std::vector<Pose>& initial_poses() const { return t0_; }

  /// Joint payloads pass through; EEF deltas become T0 * delta and are solved by IK warm-started
  /// at q_actual. Limbs missing from the command hold fallback (q_actual when empty).
  JointTargets interpret(const LeaderCommand& cmd, const FollowerState& state,
                         const std::vector<JointVector>& fallback = {}) const;

  /// interpret() followed by safety_filter() against prev.
  ControlSignal process(const LeaderCommand& cmd, const FollowerState& state, const std::vector<JointVector>& prev) const;

  const RobotModel& model() const { return *model_; }
  const SafetyConfig& safety() const { return safety_; }
  const std::vector<IKConfig>& ik() const { return ik_; }

 private:
  std::shared_ptr<const RobotModel> model_;
  std::vector<IKConfig> ik_;
  SafetyConfig safety_;
  std::vector<Pose> t0_;
};

}  // namespace teleop
