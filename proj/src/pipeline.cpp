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

#include "teleop/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace teleop {

SafetyConfig SafetyConfig::from_model(const RobotModel& model, double dt, double margin) {
  SafetyConfig cfg;
  cfg.dt = dt;
  cfg.collision_margin = margin;
  std::vector<JointVector> q;
  for (const auto& limb : model.limbs) {
    cfg.velocity_limits.push_back(limb.velocity_limits());
    q.push_back(JointVector::Zero(static_cast<Eigen::Index>(limb.dof())));
  }
  cfg.collision_pairs = kernels::candidate_pairs(kernels::place_spheres(model, q));
  return cfg;
}

void SafetyConfig::validate(const RobotModel& model) const {
  if (!(dt > 0.0)) throw ConfigError("safety: dt must be positive");
  if (!(collision_margin >= 0.0)) throw ConfigError("safety: collision margin must be non-negative");
  if (velocity_limits.size() != model.limbs.size()) throw ConfigError("safety: velocity limits needed for every limb");
  std::size_t spheres = 0;
  for (std::size_t l = 0; l < model.limbs.size(); ++l) {
    const auto& v = velocity_limits[l];
    if (v.size() != static_cast<Eigen::Index>(model.limbs[l].dof())) {
      throw ConfigError("safety: velocity limits of limb '" + model.limbs[l].name + "' have wrong length");
    }
    if (!(v.array() > 0.0).all()) throw ConfigError("safety: velocity limits must be positive");
    spheres += model.limbs[l].collision_spheres.size();
  }
  for (const auto& p : collision_pairs) {
    if (p.a < 0 || p.b <= p.a || static_cast<std::size_t>(p.b) >= spheres) {
      throw ConfigError("safety: collision pair out of range");
    }
  }
}

std::vector<CollisionPair> check_self_collision(const RobotModel& model, const std::vector<JointVector>& q,
                                                const SafetyConfig& cfg) {
  const auto spheres = kernels::place_spheres(model, q);
  const auto hits = cfg.parallel ? kernels::find_overlaps_parallel(spheres, cfg.collision_pairs, cfg.collision_margin)
                                 : kernels::find_overlaps_serial(spheres, cfg.collision_pairs, cfg.collision_margin);
  std::vector<CollisionPair> out;
  out.reserve(hits.size());
  for (const auto& h : hits) {
    const auto& a = spheres[static_cast<std::size_t>(h.a)];
    const auto& b = spheres[static_cast<std::size_t>(h.b)];
    out.push_back({a.limb, a.index, b.limb, b.index, (a.center - b.center).norm()});
  }
  return out;
}

ControlSignal safety_filter(const std::vector<JointVector>& targets, const std::vector<JointVector>& prev,
                            const RobotModel& model, const SafetyConfig& cfg) {
  const std::size_t n = model.limbs.size();
  if (targets.size() != n || prev.size() != n || cfg.velocity_limits.size() != n) {
    throw DimensionError("safety_filter: expected " + std::to_string(n) + " limbs");
  }
  ControlSignal out;
  out.flags.resize(n);
  out.q_cmd.resize(n);
  for (std::size_t l = 0; l < n; ++l) {
    const LimbChain& chain = model.limbs[l];
    const auto dof = static_cast<Eigen::Index>(chain.dof());
    if (targets[l].size() != dof || prev[l].size() != dof) {
      throw DimensionError("safety_filter: limb '" + chain.name + "' expects " + std::to_string(dof) + " joints");
    }
    const JointVector clamped = chain.clamp(targets[l]);
    out.flags[l].limit_clamped = (clamped.array() != targets[l].array()).any();
    out.q_cmd[l] = clamped;
    for (Eigen::Index j = 0; j < dof; ++j) {
      const double p = prev[l][j];
      const double step_max = cfg.velocity_limits[l][j] * cfg.dt;
      const double d = clamped[j] - p;
      if (std::abs(d) <= step_max) continue;
      // Exact in floating point: the executed step never exceeds step_max.
      double q = p + std::copysign(step_max, d);
      while (std::abs(q - p) > step_max) q = std::nextafter(q, p);
      out.q_cmd[l][j] = q;
      out.flags[l].velocity_clamped = true;
    }
  }

  if (cfg.collision_pairs.empty()) return out;
  std::vector<bool> held(n, false);
  for (std::size_t round = 0; round <= n; ++round) {
    bool changed = false;
    for (const auto& c : check_self_collision(model, out.q_cmd, cfg)) {
      for (int limb : {c.limb_a, c.limb_b}) {
        const auto l = static_cast<std::size_t>(limb);
        if (held[l]) continue;
        held[l] = true;
        out.q_cmd[l] = prev[l];
        out.flags[l].collision_hold = true;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return out;
}

TeleopPipeline::TeleopPipeline(std::shared_ptr<const RobotModel> model, std::vector<IKConfig> ik, SafetyConfig safety)
    : model_(std::move(model)), ik_(std::move(ik)), safety_(std::move(safety)) {
  if (!model_) throw ConfigError("pipeline: no model");
  if (ik_.empty()) ik_.assign(model_->limbs.size(), IKConfig{});
  if (ik_.size() != model_->limbs.size()) throw ConfigError("pipeline: one IK config per limb required");
  for (std::size_t l = 0; l < ik_.size(); ++l) ik_[l].validate(model_->limbs[l].dof());
  safety_.validate(*model_);
  for (const auto& limb : model_->limbs) t0_.push_back(forward_kinematics(limb, limb.clamp(JointVector::Zero(static_cast<Eigen::Index>(limb.dof())))));
}

void TeleopPipeline::check_leader(const std::vector<LeaderLimbInfo>& info) const {
  std::vector<bool> seen(model_->limbs.size(), false);
  for (const auto& li : info) {
    const auto idx = model_->limb_index(li.follower_limb);
    if (!idx) throw ConfigError("leader drives unknown follower limb '" + li.follower_limb + "'");
    if (seen[*idx]) throw ConfigError("follower limb '" + li.follower_limb + "' driven twice");
    seen[*idx] = true;
    const auto& chain = model_->limbs[*idx];
    if (li.kind == PayloadKind::kJointPositions && li.dof != chain.dof()) {
      throw ConfigError("joint payload for '" + li.follower_limb + "' has " + std::to_string(li.dof) +
                        " joints, follower limb has " + std::to_string(chain.dof()));
    }
  }
}

void TeleopPipeline::capture_initial(const FollowerState& state) {
  if (state.T_actual.size() != model_->limbs.size()) throw DimensionError("capture_initial: wrong limb count");
  t0_ = state.T_actual;
}

JointTargets TeleopPipeline::interpret(const LeaderCommand& cmd, const FollowerState& state,
                                       const std::vector<JointVector>& fallback) const {
  const std::size_t n = model_->limbs.size();
  if (state.q_actual.size() != n) throw DimensionError("interpret: follower state has wrong limb count");
  JointTargets out;
  out.q = fallback.size() == n ? fallback : state.q_actual;
  out.T_cmd.resize(n);
  out.gripper = state.gripper_actual.size() == n ? state.gripper_actual : std::vector<double>(n, 0.0);
  out.ik_converged.assign(n, true);
  for (std::size_t l = 0; l < n; ++l) {
    out.T_cmd[l] = state.T_cmd_last.size() == n ? state.T_cmd_last[l] : forward_kinematics(model_->limbs[l], out.q[l]);
  }

  std::vector<kernels::IKTask> tasks;
  std::vector<std::size_t> task_limb;
  for (const auto& lc : cmd.limbs) {
    const auto idx = model_->limb_index(lc.limb);
    if (!idx) throw ConfigError("command for unknown follower limb '" + lc.limb + "'");
    const std::size_t l = *idx;
    const LimbChain& chain = model_->limbs[l];
    out.gripper[l] = std::clamp(lc.gripper, 0.0, 1.0);
    if (const auto* jp = std::get_if<JointPositions>(&lc.payload)) {
      if (jp->q.size() != static_cast<Eigen::Index>(chain.dof())) {
        throw DimensionError("joint payload for '" + lc.limb + "' has wrong length");
      }
      out.q[l] = jp->q;
      out.T_cmd[l] = forward_kinematics(chain, chain.clamp(jp->q));
    } else {
      out.T_cmd[l] = t0_[l] * std::get<EefDelta>(lc.payload).delta;
      tasks.push_back({&chain, out.T_cmd[l], state.q_actual[l], &ik_[l]});
      task_limb.push_back(l);
    }
  }
  if (!tasks.empty()) {
    const auto results = safety_.parallel && tasks.size() > 1 ? kernels::solve_batch_parallel(tasks)
                                                              : kernels::solve_batch_serial(tasks);
    for (std::size_t i = 0; i < results.size(); ++i) {
      out.q[task_limb[i]] = results[i].q_solution;
      out.ik_converged[task_limb[i]] = results[i].converged;
    }
  }
  return out;
}

ControlSignal TeleopPipeline::process(const LeaderCommand& cmd, const FollowerState& state,
                                      const std::vector<JointVector>& prev) const {
  JointTargets t = interpret(cmd, state, prev);
  ControlSignal sig = safety_filter(t.q, prev, *model_, safety_);
  sig.T_cmd = std::move(t.T_cmd);
  sig.gripper_cmd = std::move(t.gripper);
  for (std::size_t l = 0; l < sig.flags.size(); ++l) sig.flags[l].ik_converged = t.ik_converged[l];
  sig.timestamp = cmd.timestamp;
  return sig;
}

}  // namespace teleop
