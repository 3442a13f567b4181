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

#include <gtest/gtest.h>

#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "teleop/errors.hpp"
#include "teleop/se3.hpp"
#include "test_support.hpp"

namespace teleop {
namespace {

using testing::max_abs_diff;
using testing::random_pose;
using testing::random_unit;

Eigen::Matrix4d hat(const Twist& x) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m.topLeftCorner<3, 3>() = skew(x.angular);
  m.topRightCorner<3, 1>() = x.linear;
  return m;
}

Twist random_twist(std::mt19937_64& rng, double max_angle) {
  std::uniform_real_distribution<double> a(0.0, max_angle);
  std::uniform_real_distribution<double> t(-1.0, 1.0);
  Twist x;
  x.angular = a(rng) * random_unit(rng);
  x.linear = {t(rng), t(rng), t(rng)};
  return x;
}

TEST(Se3, ExpMatchesMatrixExponential) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const Twist x = random_twist(rng, M_PI - 1e-3);
    const Eigen::Matrix4d oracle = hat(x).exp();
    EXPECT_LT(max_abs_diff(exp_map(x).matrix(), oracle), 1e-10);
  }
}

TEST(Se3, LogMatchesMatrixLogarithm) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const Pose p = random_pose(rng, 3.0);
    const Eigen::Matrix4d oracle = p.matrix().log();
    EXPECT_LT(max_abs_diff(hat(log_map(p)), oracle), 1e-9);
  }
}

TEST(Se3, RotationLogMatchesAngleAxis) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const Pose p = random_pose(rng, 3.1);
    const Eigen::AngleAxisd aa(p.rotation());
    EXPECT_LT((log_map(p).angular - aa.angle() * aa.axis()).norm(), 1e-9);
  }
}

TEST(Se3, SmallAngleSeriesIsContinuous) {
  const Eigen::Vector3d axis = Eigen::Vector3d(1, 2, -1).normalized();
  for (double angle : {0.0, 1e-12, 1e-8, 9.99e-4, 1e-3, 1.01e-3, 1e-2}) {
    Twist x;
    x.angular = angle * axis;
    x.linear = {0.3, -0.2, 0.1};
    const Eigen::Matrix4d oracle = hat(x).exp();
    EXPECT_LT(max_abs_diff(exp_map(x).matrix(), oracle), 1e-13) << angle;
    EXPECT_LT((log_map(exp_map(x)).vector() - x.vector()).norm(), 1e-12) << angle;
  }
}

TEST(Se3, LogNearPiThrows) {
  const Pose p = Pose::from_axis_angle(Eigen::Vector3d::UnitZ(), M_PI - 1e-7);
  EXPECT_THROW(log_map(p), NearSingularRotation);
  const Twist b = log_map_branch(p);
  EXPECT_NEAR(b.angular.norm(), M_PI - 1e-7, 1e-9);
  EXPECT_LT(max_abs_diff(exp_map(b).matrix(), p.matrix()), 1e-9);
}

TEST(Se3, BranchAtExactlyPi) {
  const Eigen::Vector3d axis = Eigen::Vector3d(0.2, -0.5, 0.8).normalized();
  const Pose p = Pose::from_axis_angle(axis, M_PI, {0.1, 0.2, 0.3});
  const Twist b = log_map_branch(p);
  EXPECT_NEAR(b.angular.norm(), M_PI, 1e-9);
  EXPECT_LT(max_abs_diff(exp_map(b).matrix(), p.matrix()), 1e-9);
}

TEST(Se3, ComposeAndInverseMatchMatrices) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    const Pose a = random_pose(rng);
    const Pose b = random_pose(rng);
    EXPECT_LT(max_abs_diff((a * b).matrix(), a.matrix() * b.matrix()), 1e-12);
    EXPECT_LT(max_abs_diff(inverse(a).matrix(), a.matrix().inverse()), 1e-12);
  }
}

TEST(Se3, QuaternionRoundTrip) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const Pose a = random_pose(rng);
    const Pose b = Pose::from_quaternion(a.quaternion(), a.translation());
    EXPECT_LT(max_abs_diff(a.matrix(), b.matrix()), 1e-12);
  }
}

TEST(Se3, RpyHandCases) {
  // Yaw of 90 degrees maps x to y; roll of 90 degrees maps y to z; roll is applied first,
  // so roll then yaw sends z to -y and then to x.
  EXPECT_LT((rotation_from_rpy(0, 0, M_PI / 2) * Eigen::Vector3d::UnitX() - Eigen::Vector3d::UnitY()).norm(), 1e-15);
  EXPECT_LT((rotation_from_rpy(M_PI / 2, 0, 0) * Eigen::Vector3d::UnitY() - Eigen::Vector3d::UnitZ()).norm(), 1e-15);
  EXPECT_LT((rotation_from_rpy(M_PI / 2, 0, M_PI / 2) * Eigen::Vector3d::UnitY() - Eigen::Vector3d::UnitZ()).norm(), 1e-15);
  EXPECT_LT((rotation_from_rpy(M_PI / 2, 0, M_PI / 2) * Eigen::Vector3d::UnitZ() - Eigen::Vector3d::UnitX()).norm(), 1e-15);
}

TEST(Se3, LongCompositionChainsStayOrthonormal) {
  std::mt19937_64 rng(6);
  const Pose step = random_pose(rng, 0.05, 0.01);
  Pose acc;
  for (int i = 0; i < 20000; ++i) {
    acc = acc * step;
    ASSERT_LT(acc.compositions(), Pose::kRenormalizeEvery);
  }
  EXPECT_TRUE(acc.is_valid(1e-9));
}

TEST(Se3, OrthonormalizeRepairsDrift) {
  Eigen::Matrix3d r = Eigen::AngleAxisd(0.7, Eigen::Vector3d::UnitY()).toRotationMatrix();
  r(0, 1) += 1e-4;
  const Eigen::Matrix3d fixed = orthonormalize(r);
  EXPECT_LT(orthonormality_error(fixed), 1e-14);
  EXPECT_NEAR(fixed.determinant(), 1.0, 1e-14);
  EXPECT_LT(max_abs_diff(fixed, r), 1e-3);
}

TEST(Se3, Rotate6IsBlockDiagonal) {
  const Eigen::Matrix3d r = Eigen::AngleAxisd(0.4, Eigen::Vector3d::UnitX()).toRotationMatrix();
  const Matrix6d m = rotate6(r);
  const Eigen::Matrix3d tl = m.block(0, 0, 3, 3), br = m.block(3, 3, 3, 3);
  EXPECT_EQ(tl, r);
  EXPECT_EQ(br, r);
  EXPECT_TRUE(m.block(0, 3, 3, 3).isZero());
  EXPECT_TRUE(m.block(3, 0, 3, 3).isZero());
}

}  // namespace
}  // namespace teleop
