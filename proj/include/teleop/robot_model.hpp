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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "teleop/errors.hpp"
#include "teleop/se3.hpp"

namespace teleop {

using JointVector = Eigen::VectorXd;
using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;

/// Limits assigned to continuous joints.
inline constexpr double kContinuousLimit = 1e9;

enum class JointKind { kRevolute, kPrismatic, kFixed };

struct JointSpec {
  std::string name;
  JointKind kind = JointKind::kRevolute;
  bool continuous = false;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  /// Parent frame to joint frame. Fixed joints preceding this one are folded in.
  Pose origin;
  double lower = 0.0;
  double upper = 0.0;
  double velocity_limit = 1.0;
};

/// Sphere rigidly attached to the frame of movable joint `frame` of its limb.
struct CollisionSphere {
  int frame = 0;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 0.0;
};

/// Serial chain between a base link and a tip link. Only movable joints are kept;
/// fixed joints are folded into the next origin or into eef_frame.
struct LimbChain {
  std::string name;
  std::string base_link;
  std::string tip_link;
  /// Pose of base_link in the description's root link (movable joints above it taken at zero).
  Pose base_in_root;
  std::vector<JointSpec> joints;
  Pose eef_frame;
  std::optional<JointSpec> gripper_joint;
  std::vector<CollisionSphere> collision_spheres;

  std::size_t dof() const { return joints.size(); }
  JointVector lower_limits() const;
  JointVector upper_limits() const;
  JointVector velocity_limits() const;
  std::vector<std::string> joint_names() const;
  bool within_limits(const JointVector& q, double tol = 0.0) const;
  JointVector clamp(const JointVector& q) const;
};

struct RobotModel {
  std::string name;
  std::vector<LimbChain> limbs;
  /// Predefined base joint configuration, one vector per limb.
  std::vector<JointVector> base_pose;

  std::optional<std::size_t> limb_index(std::string_view limb) const;
  const LimbChain& limb(std::string_view limb) const;
  std::vector<std::string> limb_names() const;
};

/// Sphere authored against a link name in the follower config.
struct SphereSpec {
  std::string link;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 0.0;
};

/// One limb to extract from a robot description.
struct LimbSelection {
  std::string name;
  std::string base_link;
  std::string tip_link;
  std::optional<std::string> gripper_joint;
  std::vector<SphereSpec> spheres;
  std::optional<std::vector<double>> base_pose;
};

class StructureError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class UnsupportedJointError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class ChainExtractionError : public ConfigError {
 public:
  explicit ChainExtractionError(const std::string& link)
      : ConfigError("chain extraction failed: " + link), link_(link) {}
  const std::string& link() const { return link_; }

 private:
  std::string link_;
};

struct ParsedRobot {
  RobotModel model;
  /// Elements that were present but ignored (visuals, meshes, dynamics, transmissions, ...).
  std::vector<std::string> warnings;
};

/// Parses the URDF subset (robot/link/joint with origin, axis, limit) and extracts one
/// limb per selection. Throws ParseError, StructureError, UnsupportedJointError or
/// ChainExtractionError.
ParsedRobot parse_robot_description(std::string_view xml_text, std::span<const LimbSelection> limbs);

/// EEF pose in the limb base frame.
Pose forward_kinematics(const LimbChain& chain, const JointVector& q);

/// Pose of every movable joint frame base to tip, followed by the EEF frame (dof + 1 entries).
std::vector<Pose> frame_positions(const LimbChain& chain, const JointVector& q);

/// 6 x dof geometric Jacobian at the EEF origin, expressed in the base frame, rows (linear; angular).
Jacobian geometric_jacobian(const LimbChain& chain, const JointVector& q);

/// Same Jacobian with both blocks rotated into the EEF frame.
Jacobian body_jacobian(const LimbChain& chain, const JointVector& q);

}  // namespace teleop
