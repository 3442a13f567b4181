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

// Data-parallel inner loops of the control step. Each kernel has a serial reference
// implementation and an OpenMP variant; tests hold the two to identical output and
// bench/ compares their throughput.

#include <span>
#include <vector>

#include <Eigen/Core>

#include "teleop/ik_solver.hpp"
#include "teleop/robot_model.hpp"

namespace teleop::kernels {

/// Collision sphere placed in the robot's root frame.
struct WorldSphere {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 0.0;
  int limb = 0;
  int frame = 0;
  int index = 0;  // position within its limb's sphere list
};

/// Indices into a WorldSphere array, a < b.
struct SpherePair {
  int a = 0;
  int b = 0;
  friend bool operator==(const SpherePair&, const SpherePair&) = default;
};

/// Places every limb's spheres at configuration q (one vector per limb).
std::vector<WorldSphere> place_spheres(const RobotModel& model, std::span<const JointVector> q);

/// Pairs worth checking: every cross-limb pair, plus same-limb pairs whose frames are
/// more than one joint apart.
std::vector<SpherePair> candidate_pairs(std::span<const WorldSphere> spheres);

/// Pairs closer than r_a + r_b + margin, in candidate order.
std::vector<SpherePair> find_overlaps_serial(std::span<const WorldSphere> spheres,
                                             std::span<const SpherePair> candidates, double margin);
std::vector<SpherePair> find_overlaps_parallel(std::span<const WorldSphere> spheres,
                                               std::span<const SpherePair> candidates, double margin);

struct IKTask {
  const LimbChain* chain = nullptr;
  Pose target;
  JointVector q0;
  const IKConfig* config = nullptr;
};

/// Independent IK solves, results in task order.
std::vector<IKResult> solve_batch_serial(std::span<const IKTask> tasks);
std::vector<IKResult> solve_batch_parallel(std::span<const IKTask> tasks);

}  // namespace teleop::kernels
