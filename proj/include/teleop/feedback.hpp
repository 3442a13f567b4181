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

#include <atomic>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "teleop/clock.hpp"
#include "teleop/leader.hpp"
#include "teleop/mailbox.hpp"
#include "teleop/types.hpp"

namespace teleop {

struct FeedbackConfig {
  double kp = 1.0;
  double bias_gain = 0.3;
  double gripper_gain = 1.0;
  double torque_clip = 1.0;
  double rate = 200.0;
  /// Tracking terms are zeroed when the teleop snapshot is older than this (s).
  double stale_after = 0.1;
  double damping = 1e-3;

  void validate() const;
};

inline constexpr double kNoClip = std::numeric_limits<double>::infinity();

/// gain * (q_base - q_leader): pulls the leader back toward its base pose.
JointVector bias_torque(const JointVector& q_leader, const JointVector& q_base, double gain, double clip = kNoClip);

/// -gain * (q_leader - q_follower).
JointVector tracking_torque_joint(const JointVector& q_leader, const JointVector& q_follower, double gain,
                                  double clip = kNoClip);

/// -kp * pinv(J_leader) * log(T_actual^{-1} T_cmd). J_leader must be expressed in the same
/// frame as the twist, i.e. the leader body Jacobian when the EEF frames correspond.
JointVector tracking_torque_task(const Pose& T_actual, const Pose& T_cmd, const Jacobian& j_leader, double kp,
                                 double clip = kNoClip, double damping = 1e-3);

/// gain * (g_leader - g_follower).
double gripper_torque(double g_leader, double g_follower, double gain, double clip = kNoClip);

/// One feedback evaluation from the freshest snapshots. signal/state may be null.
FeedbackTorques compute_feedback(const LeaderSnapshot& leader, const ControlSignal* signal, const FollowerState* state,
                                 const RobotModel& follower, const FeedbackConfig& cfg, double now);

/// Periodic feedback computation. step() is the deterministic core; start() runs it on its
/// own thread at cfg.rate against a realtime clock.
class FeedbackLoop {
 public:
  FeedbackLoop(Leader& leader, std::shared_ptr<const RobotModel> follower, const LatestValue<ControlSignal>& signal,
               const LatestValue<FollowerState>& state, FeedbackConfig cfg);
  ~FeedbackLoop();

  FeedbackLoop(const FeedbackLoop&) = delete;
  FeedbackLoop& operator=(const FeedbackLoop&) = delete;

  /// Computes and publishes one FeedbackTorques; returns null when the leader has no snapshot yet.
  std::shared_ptr<const FeedbackTorques> step(double now);

  void start(Clock& clock);
  void stop();
  bool running() const { return thread_.joinable(); }

  const LatestValue<FeedbackTorques>& output() const { return output_; }
  std::uint64_t publications() const { return output_.version(); }
  /// Timestamps of the most recent publications (bounded).
  std::vector<double> publication_times() const;
  const FeedbackConfig& config() const { return cfg_; }

 private:
  Leader& leader_;
  std::shared_ptr<const RobotModel> follower_;
  const LatestValue<ControlSignal>& signal_;
  const LatestValue<FollowerState>& state_;
  FeedbackConfig cfg_;
  LatestValue<FeedbackTorques> output_;
  std::uint64_t sequence_ = 0;
  std::atomic<bool> stop_{false};
  std::thread thread_;
  mutable std::mutex times_mutex_;
  std::vector<double> times_;
};

}  // namespace teleop
