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

#include "teleop/ik_solver.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

namespace teleop {

void IKConfig::validate(std::size_t dof) const {
  if (!(damping >= 0.0)) throw ConfigError("ik: damping must be >= 0");
  if (max_iterations < 1) throw ConfigError("ik: max_iterations must be >= 1");
  if (!(position_tolerance > 0.0) || !(orientation_tolerance > 0.0)) {
    throw ConfigError("ik: tolerances must be positive");
  }
  if (!(step_scale > 0.0 && step_scale <= 1.0)) throw ConfigError("ik: step_scale must be in (0, 1]");
  if (max_halvings < 0) throw ConfigError("ik: max_halvings must be >= 0");
  if (joint_weights.size() != 0) {
    if (static_cast<std::size_t>(joint_weights.size()) != dof) {
      throw ConfigError("ik: joint_weights has " + std::to_string(joint_weights.size()) + " entries, chain has " +
                        std::to_string(dof));
    }
    for (Eigen::Index i = 0; i < joint_weights.size(); ++i) {
      if (!(joint_weights[i] > 0.0 && joint_weights[i] <= 1.0)) {
        throw ConfigError("ik: joint weights must lie in (0, 1]");
      }
    }
  }
}

double IKResult::normalized_residual(const IKConfig& cfg) const {
  return std::max(residual_position / cfg.position_tolerance, residual_orientation / cfg.orientation_tolerance);
}

Eigen::MatrixXd damped_pseudo_inverse(const Eigen::MatrixXd& j, double damping) {
  const double d2 = damping * damping;
  if (j.rows() <= j.cols()) {
    Eigen::MatrixXd jjt = j * j.transpose();
    jjt.diagonal().array() += d2;
    return j.transpose() * jjt.ldlt().solve(Eigen::MatrixXd::Identity(j.rows(), j.rows()));
  }
  Eigen::MatrixXd jtj = j.transpose() * j;
  jtj.diagonal().array() += d2;
  return jtj.ldlt().solve(j.transpose());
}

namespace {

struct Evaluation {
  Vector6d error;  // base-frame (linear; angular)
  double position = 0.0;
  double orientation = 0.0;
  double score = 0.0;
};

Evaluation evaluate(const LimbChain& chain, const Pose& target, const JointVector& q, const IKConfig& cfg) {
  const Pose current = forward_kinematics(chain, q);
  const Twist body = log_map_branch(inverse(current) * target);
  Evaluation ev;
  ev.error << current.rotation() * body.linear, current.rotation() * body.angular;
  ev.position = (target.translation() - current.translation()).norm();
  ev.orientation = body.angular.norm();
  ev.score = std::max(ev.position / cfg.position_tolerance, ev.orientation / cfg.orientation_tolerance);
  return ev;
}

}  // namespace

IKResult solve(const LimbChain& chain, const Pose& target, const JointVector& q0, const IKConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(chain.dof());
  if (q0.size() != n) {
    throw DimensionError("ik: q0 has " + std::to_string(q0.size()) + " entries, chain '" + chain.name + "' has " +
                         std::to_string(n));
  }
  if (!target.rotation().allFinite() || !target.translation().allFinite()) {
    throw Error("ik: non-finite target pose");
  }
  if (!q0.allFinite() || !chain.within_limits(q0, 1e-12)) {
    throw Error("ik: initial guess outside joint limits for limb '" + chain.name + "'");
  }
  cfg.validate(chain.dof());
  const JointVector w = cfg.joint_weights.size() == 0 ? JointVector::Ones(n) : cfg.joint_weights;

  JointVector q = chain.clamp(q0);
  Evaluation ev = evaluate(chain, target, q, cfg);
  JointVector best_q = q;
  Evaluation best = ev;

  IKResult result;
  if (ev.score < 1.0) {
    result = {q, true, 0, ev.position, ev.orientation};
    return result;
  }

  int it = 0;
  while (it < cfg.max_iterations) {
    ++it;
    const Jacobian jac = geometric_jacobian(chain, q);
    const Eigen::MatrixXd jw = jac * w.asDiagonal();
    const JointVector dq = w.asDiagonal() * (damped_pseudo_inverse(jw, cfg.damping) * ev.error);

    double step = cfg.step_scale;
    JointVector q_next;
    Evaluation next;
    for (int h = 0;; ++h) {
      q_next = chain.clamp(q + step * dq);
      next = evaluate(chain, target, q_next, cfg);
      if (next.score <= ev.score || h >= cfg.max_halvings) break;
      step *= 0.5;
    }
    q = std::move(q_next);
    ev = next;
    if (ev.score < best.score) {
      best = ev;
      best_q = q;
    }
    if (ev.score < 1.0) break;
  }

  result.q_solution = best_q;
  result.converged = best.score < 1.0;
  result.iterations_used = it;
  result.residual_position = best.position;
  result.residual_orientation = best.orientation;
  return result;
}

std::pair<IKResult, IKResult> solve_weighted_demo(const LimbChain& chain, const Pose& target,
                                                  const JointVector& q0, double w1, const IKConfig& base) {
  IKConfig plain = base;
  plain.joint_weights = JointVector::Ones(static_cast<Eigen::Index>(chain.dof()));
  IKConfig weighted = plain;
  weighted.joint_weights[0] = w1;
  return {solve(chain, target, q0, plain), solve(chain, target, q0, weighted)};
}

}  // namespace teleop
