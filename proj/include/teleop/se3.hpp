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

#include <cstdint>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace teleop {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

/// Element of se(3). Linear part in meters, angular part as a scaled rotation axis in radians.
struct Twist {
  Eigen::Vector3d linear = Eigen::Vector3d::Zero();
  Eigen::Vector3d angular = Eigen::Vector3d::Zero();

  /// Stacked as (linear; angular).
  Vector6d vector() const;
  static Twist from_vector(const Vector6d& v);
};

/// Rigid transform in SE(3): rotation matrix plus translation in meters.
///
/// Compositions track how many products a rotation has accumulated since it was last
/// re-orthonormalized; the product is projected back onto SO(3) (polar decomposition)
/// every kRenormalizeEvery compositions, or earlier when the orthonormality error
/// exceeds kDriftTolerance.
class Pose {
 public:
  static constexpr std::uint32_t kRenormalizeEvery = 1000;
  static constexpr double kDriftTolerance = 1e-7;

  Pose() = default;
  Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

  static Pose identity() { return Pose(); }
  static Pose from_translation(const Eigen::Vector3d& t);
  static Pose from_translation(double x, double y, double z) { return from_translation({x, y, z}); }
  /// Extrinsic X-Y-Z roll/pitch/yaw, i.e. R = Rz(yaw) * Ry(pitch) * Rx(roll).
  static Pose from_rpy(double roll, double pitch, double yaw,
                       const Eigen::Vector3d& t = Eigen::Vector3d::Zero());
  static Pose from_axis_angle(const Eigen::Vector3d& axis, double angle,
                              const Eigen::Vector3d& t = Eigen::Vector3d::Zero());
  static Pose from_quaternion(const Eigen::Quaterniond& q,
                              const Eigen::Vector3d& t = Eigen::Vector3d::Zero());

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }
  Eigen::Quaterniond quaternion() const;
  Eigen::Matrix4d matrix() const;
  /// Rotation angle in [0, pi].
  double rotation_angle() const;
  std::uint32_t compositions() const { return compositions_; }

  Eigen::Vector3d operator*(const Eigen::Vector3d& point) const {
    return rotation_ * point + translation_;
  }

  /// True when R is special orthogonal within tol.
  bool is_valid(double tol = 1e-9) const;

  friend Pose compose(const Pose& a, const Pose& b);

 private:
  Eigen::Matrix3d rotation_ = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation_ = Eigen::Vector3d::Zero();
  std::uint32_t compositions_ = 0;
};

/// Homogeneous product a * b.
Pose compose(const Pose& a, const Pose& b);
inline Pose operator*(const Pose& a, const Pose& b) { return compose(a, b); }

/// R^T, -R^T t.
Pose inverse(const Pose& p);

/// Principal logarithm. Throws NearSingularRotation when the rotation angle is within
/// kLogSingularBand of pi; use log_map_branch() where a total function is needed.
Twist log_map(const Pose& p);

/// Same as log_map, except that near pi the axis is taken from the column of (R + R^T)/2 - cos(theta) I
/// with the largest diagonal entry, and its sign from the skew part of R (positive when zero).
Twist log_map_branch(const Pose& p);

/// Rodrigues rotation with the V-matrix applied to the linear part.
Pose exp_map(const Twist& x);

inline constexpr double kLogSingularBand = 1e-6;

Eigen::Matrix3d skew(const Eigen::Vector3d& v);
/// Frobenius-closest rotation (polar decomposition, det forced to +1).
Eigen::Matrix3d orthonormalize(const Eigen::Matrix3d& r);
/// max |R^T R - I| entry.
double orthonormality_error(const Eigen::Matrix3d& r);
Eigen::Matrix3d rotation_from_rpy(double roll, double pitch, double yaw);

/// Block-diagonal [R 0; 0 R] that rotates a stacked (linear; angular) vector.
Matrix6d rotate6(const Eigen::Matrix3d& r);

}  // namespace teleop
