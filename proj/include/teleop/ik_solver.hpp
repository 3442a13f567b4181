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

#include <utility>

#include <Eigen/Core>

#include "teleop/robot_model.hpp"
#include "teleop/se3.hpp"

namespace teleop {

struct IKConfig {
  double damping = 1e-3;
  int max_iterations = 100;
  double position_tolerance = 1e-4;     // m
  double orientation_tolerance = 1e-4;  // rad
  /// Per-joint priority in (0, 1]; empty means all ones.
  JointVector joint_weights;
  double step_scale = 1.0;
  int max_halvings = 4;

  /// Throws ConfigError when a field is out of range for a chain with `dof` joints.
  void validate(std::size_t dof) const;
};

struct IKResult {
  JointVector q_solution;
  bool converged = false;
  int iterations_used = 0;
  double residual_position = 0.0;
  double residual_orientation = 0.0;

  /// max(position / tol_p, orientation / tol_o); below 1 means converged.
  double normalized_residual(const IKConfig& cfg) const;
};

/// Damped least-squares inverse: J^T (J J^T + damping^2 I)^{-1}, evaluated in the
/// smaller of the two normal-equation spaces.
Eigen::MatrixXd damped_pseudo_inverse(const Eigen::MatrixXd& j, double damping);

/// Iterative damped, joint-weighted IK.
///
/// Each iteration takes dq = W (J W)^+ e, where e is the body twist
/// log(FK(q)^{-1} target) rotated into the base frame and W = diag(joint_weights).
/// The step is halved while the residual grows (at most max_halvings times) and q is
/// clamped to the joint limits after every step. The returned q is the lowest-residual
/// iterate; an unreachable target yields converged = false rather than an error.
IKResult solve(const LimbChain& chain, const Pose& target, const JointVector& q0, const IKConfig& cfg);

/// Solves once unweighted and once with the first joint's weight set to `w1`.
std::pair<IKResult, IKResult> solve_weighted_demo(const LimbChain& chain, const Pose& target,
                                                  const JointVector& q0, double w1,
                                                  const IKConfig& base = IKConfig{});

}  // namespace teleop
