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

#include "teleop/se3.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/SVD>

#include "teleop/errors.hpp"

namespace teleop {

namespace {

// Below this angle the trigonometric coefficients switch to their Taylor series.
constexpr double kSeriesThreshold = 1e-3;

struct RodriguesCoefficients {
  double a;  // sin(t)/t
  double b;  // (1 - cos(t))/t^2
  double c;  // (t - sin(t))/t^3
};

RodriguesCoefficients coefficients(double theta) {
  if (theta < kSeriesThreshold) {
    const double t2 = theta * theta;
    return {1.0 - t2 / 6.0 + t2 * t2 / 120.0, 0.5 - t2 / 24.0 + t2 * t2 / 720.0,
            1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0};
  }
  const double s = std::sin(theta);
  const double half = std::sin(0.5 * theta) / (0.5 * theta);
  const double t2 = theta * theta;
  // 1 - cos(t) = 2 sin^2(t/2) avoids cancellation just above the threshold.
  return {s / theta, 0.5 * half * half, (theta - s) / (t2 * theta)};
}

Eigen::Vector3d skew_part(const Eigen::Matrix3d& r) {
  return {r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)};
}

// V^{-1} t for the rotation vector omega of angle theta.
Eigen::Vector3d inverse_v_times(const Eigen::Vector3d& omega, double theta, const Eigen::Vector3d& t) {
  const Eigen::Matrix3d w = skew(omega);
  double d;
  if (theta < kSeriesThreshold) {
    const double t2 = theta * theta;
    d = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0;
  } else {
    const double h = 0.5 * theta;
    d = (1.0 - h / std::tan(h)) / (theta * theta);
  }
  return t - 0.5 * (w * t) + d * (w * (w * t));
}

Twist log_impl(const Pose& p, bool allow_branch) {
  const Eigen::Matrix3d& r = p.rotation();
  const Eigen::Vector3d sk = skew_part(r);  // 2 sin(theta) n
  const double s = 0.5 * sk.norm();
  const double c = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
  const double theta = std::atan2(s, c);

  Eigen::Vector3d omega;
  if (std::numbers::pi - theta < kLogSingularBand) {
    if (!allow_branch) {
      throw NearSingularRotation(theta);
    }
    Eigen::Matrix3d nn = (0.5 * (r + r.transpose()) - c * Eigen::Matrix3d::Identity()) / (1.0 - c);
    Eigen::Index k = 0;
    nn.diagonal().maxCoeff(&k);
    Eigen::Vector3d n = nn.col(k) / std::sqrt(std::max(nn(k, k), 1e-300));
    n.normalize();
    if (n.dot(sk) < 0.0) {
      n = -n;
    }
    omega = theta * n;
  } else if (theta < 1e-8) {
    omega = (0.5 + theta * theta / 12.0) * sk;
  } else {
    omega = (theta / (2.0 * s)) * sk;
  }

  Twist out;
  out.angular = omega;
  out.linear = inverse_v_times(omega, theta, p.translation());
  return out;
}

}  // namespace

Vector6d Twist::vector() const {
  Vector6d v;
  v << linear, angular;
  return v;
}

Twist Twist::from_vector(const Vector6d& v) {
  Twist t;
  t.linear = v.head<3>();
  t.angular = v.tail<3>();
  return t;
}

Pose::Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {}

Pose Pose::from_translation(const Eigen::Vector3d& t) { return Pose(Eigen::Matrix3d::Identity(), t); }

Pose Pose::from_rpy(double roll, double pitch, double yaw, const Eigen::Vector3d& t) {
  return Pose(rotation_from_rpy(roll, pitch, yaw), t);
}

Pose Pose::from_axis_angle(const Eigen::Vector3d& axis, double angle, const Eigen::Vector3d& t) {
  return Pose(Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix(), t);
}

Pose Pose::from_quaternion(const Eigen::Quaterniond& q, const Eigen::Vector3d& t) {
  return Pose(q.normalized().toRotationMatrix(), t);
}

Eigen::Quaterniond Pose::quaternion() const { return Eigen::Quaterniond(rotation_).normalized(); }

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

double Pose::rotation_angle() const {
  const double s = 0.5 * skew_part(rotation_).norm();
  const double c = std::clamp(0.5 * (rotation_.trace() - 1.0), -1.0, 1.0);
  return std::atan2(s, c);
}

bool Pose::is_valid(double tol) const {
  return rotation_.allFinite() && translation_.allFinite() && orthonormality_error(rotation_) <= tol &&
         std::abs(rotation_.determinant() - 1.0) <= tol;
}

Pose compose(const Pose& a, const Pose& b) {
  Pose out(a.rotation_ * b.rotation_, a.rotation_ * b.translation_ + a.translation_);
  out.compositions_ = std::max(a.compositions_, b.compositions_) + 1;
  if (out.compositions_ >= Pose::kRenormalizeEvery ||
      orthonormality_error(out.rotation_) > Pose::kDriftTolerance) {
    out.rotation_ = orthonormalize(out.rotation_);
    out.compositions_ = 0;
  }
  return out;
}

Pose inverse(const Pose& p) {
  const Eigen::Matrix3d rt = p.rotation().transpose();
  return Pose(rt, -(rt * p.translation()));
}

Twist log_map(const Pose& p) { return log_impl(p, false); }

Twist log_map_branch(const Pose& p) { return log_impl(p, true); }

Pose exp_map(const Twist& x) {
  const double theta = x.angular.norm();
  const auto k = coefficients(theta);
  const Eigen::Matrix3d w = skew(x.angular);
  const Eigen::Matrix3d w2 = w * w;
  const Eigen::Matrix3d r = Eigen::Matrix3d::Identity() + k.a * w + k.b * w2;
  const Eigen::Matrix3d v = Eigen::Matrix3d::Identity() + k.b * w + k.c * w2;
  return Pose(r, v * x.linear);
}

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

Eigen::Matrix3d orthonormalize(const Eigen::Matrix3d& r) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) {
    u.col(2) *= -1.0;
  }
  return u * v.transpose();
}

double orthonormality_error(const Eigen::Matrix3d& r) {
  return (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

Eigen::Matrix3d rotation_from_rpy(double roll, double pitch, double yaw) {
  return (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

Matrix6d rotate6(const Eigen::Matrix3d& r) {
  Matrix6d m = Matrix6d::Zero();
  m.topLeftCorner<3, 3>() = r;
  m.bottomRightCorner<3, 3>() = r;
  return m;
}

}  // namespace teleop
