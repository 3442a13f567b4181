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

#include "teleop/feedback.hpp"

#include <algorithm>

#include "teleop/ik_solver.hpp"

namespace teleop {

namespace {

constexpr std::size_t kTimeLog = 4096;

JointVector clip_vec(const JointVector& v, double clip) { return v.cwiseMax(-clip).cwiseMin(clip); }

void same_size(const JointVector& a, const JointVector& b, const char* what) {
  if (a.size() != b.size()) throw DimensionError(std::string(what) + ": vectors differ in length");
}

}  // namespace

void FeedbackConfig::validate() const {
  if (!(kp >= 0.0) || !(bias_gain >= 0.0) || !(gripper_gain >= 0.0)) throw ConfigError("feedback: gains must be >= 0");
  if (!(torque_clip > 0.0)) throw ConfigError("feedback: torque clip must be positive");
  if (!(rate > 0.0)) throw ConfigError("feedback: rate must be positive");
  if (!(stale_after > 0.0)) throw ConfigError("feedback: stale_after must be positive");
}

JointVector bias_torque(const JointVector& q_leader, const JointVector& q_base, double gain, double clip) {
  same_size(q_leader, q_base, "bias_torque");
  return clip_vec(gain * (q_base - q_leader), clip);
}

JointVector tracking_torque_joint(const JointVector& q_leader, const JointVector& q_follower, double gain, double clip) {
  same_size(q_leader, q_follower, "tracking_torque_joint");
  return clip_vec(-gain * (q_leader - q_follower), clip);
}

JointVector tracking_torque_task(const Pose& T_actual, const Pose& T_cmd, const Jacobian& j_leader, double kp,
                                 double clip, double damping) {
  const Vector6d dx = log_map_branch(inverse(T_actual) * T_cmd).vector();
  const JointVector dq = damped_pseudo_inverse(j_leader, damping) * dx;
  return clip_vec(-kp * dq, clip);
}

double gripper_torque(double g_leader, double g_follower, double gain, double clip) {
  return std::clamp(gain * (g_leader - g_follower), -clip, clip);
}

FeedbackTorques compute_feedback(const LeaderSnapshot& leader, const ControlSignal* signal, const FollowerState* state,
                                 const RobotModel& follower, const FeedbackConfig& cfg, double now) {
  FeedbackTorques out;
  out.timestamp = now;
  const bool fresh = signal && state && now - signal->timestamp <= cfg.stale_after;
  for (const auto& ls : leader.limbs) {
    LimbFeedback f;
    f.limb = ls.follower_limb;
    f.stale = !fresh;
    const bool has_joints = ls.q.size() > 0;
    if (has_joints && ls.q_base.size() == ls.q.size()) {
      f.bias = bias_torque(ls.q, ls.q_base, cfg.bias_gain, cfg.torque_clip);
    }
    if (has_joints) f.tracking = JointVector::Zero(ls.q.size());
    const auto idx = follower.limb_index(ls.follower_limb);
    if (fresh && idx && *idx < state->q_actual.size() && *idx < signal->T_cmd.size()) {
      const std::size_t l = *idx;
      f.task_error = log_map_branch(inverse(state->T_actual[l]) * signal->T_cmd[l]).vector();
      if (ls.kind == PayloadKind::kJointPositions && has_joints) {
        f.tracking = tracking_torque_joint(ls.q, state->q_actual[l], cfg.kp, cfg.torque_clip);
      } else if (has_joints && ls.chain) {
        f.tracking = tracking_torque_task(state->T_actual[l], signal->T_cmd[l], body_jacobian(*ls.chain, ls.q), cfg.kp,
                                          cfg.torque_clip, cfg.damping);
      }
      if (l < state->gripper_actual.size()) {
        f.gripper = gripper_torque(ls.gripper, state->gripper_actual[l], cfg.gripper_gain, cfg.torque_clip);
      }
    }
    out.limbs.push_back(std::move(f));
  }
  return out;
}

FeedbackLoop::FeedbackLoop(Leader& leader, std::shared_ptr<const RobotModel> follower,
                           const LatestValue<ControlSignal>& signal, const LatestValue<FollowerState>& state,
                           FeedbackConfig cfg)
    : leader_(leader), follower_(std::move(follower)), signal_(signal), state_(state), cfg_(cfg) {
  cfg_.validate();
}

FeedbackLoop::~FeedbackLoop() { stop(); }

std::shared_ptr<const FeedbackTorques> FeedbackLoop::step(double now) {
  const auto snap = leader_.snapshot();
  if (!snap) return nullptr;
  const auto sig = signal_.get();
  const auto st = state_.get();
  FeedbackTorques f = compute_feedback(*snap, sig.get(), st.get(), *follower_, cfg_, now);
  f.sequence = ++sequence_;
  leader_.apply_feedback(f);
  output_.publish(f);
  {
    std::lock_guard lock(times_mutex_);
    if (times_.size() >= kTimeLog) times_.erase(times_.begin(), times_.begin() + kTimeLog / 2);
    times_.push_back(now);
  }
  return output_.get();
}

void FeedbackLoop::start(Clock& clock) {
  if (thread_.joinable()) return;
  stop_ = false;
  thread_ = std::thread([this, &clock] {
    const double period = 1.0 / cfg_.rate;
    double next = clock.now();
    while (!stop_.load()) {
      step(clock.now());
      next += period;
      const double now = clock.now();
      if (next < now) next = now;
      clock.sleep_until(next);
    }
  });
}

void FeedbackLoop::stop() {
  stop_ = true;
  if (thread_.joinable()) thread_.join();
}

std::vector<double> FeedbackLoop::publication_times() const {
  std::lock_guard lock(times_mutex_);
  return times_;
}

}  // namespace teleop
