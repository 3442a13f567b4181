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

#include <chrono>
#include <thread>

#include "teleop/clock.hpp"
#include "teleop/feedback.hpp"
#include "test_support.hpp"

namespace teleop {
namespace {

JointVector vec(std::initializer_list<double> v) {
  JointVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

TEST(FeedbackTerms, BiasRestoresTowardsBase) {
  const JointVector tau = bias_torque(vec({0.2, -0.1, 0.0}), vec({0.0, 0.0, 0.0}), 0.5);
  EXPECT_DOUBLE_EQ(tau[0], -0.1);
  EXPECT_DOUBLE_EQ(tau[1], 0.05);
  EXPECT_DOUBLE_EQ(tau[2], 0.0);
}

TEST(FeedbackTerms, JointTrackingPullsLeaderToFollower) {
  const JointVector tau = tracking_torque_joint(vec({0.3, 0.0}), vec({0.1, 0.2}), 2.0);
  EXPECT_DOUBLE_EQ(tau[0], -0.4);
  EXPECT_DOUBLE_EQ(tau[1], 0.4);
}

TEST(FeedbackTerms, ClipBoundsEveryComponent) {
  const JointVector tau = tracking_torque_joint(vec({10.0, -10.0, 0.1}), vec({0, 0, 0}), 1.0, 0.5);
  EXPECT_DOUBLE_EQ(tau[0], -0.5);
  EXPECT_DOUBLE_EQ(tau[1], 0.5);
  EXPECT_DOUBLE_EQ(tau[2], -0.1);
  EXPECT_DOUBLE_EQ(gripper_torque(1.0, 0.0, 5.0, 0.3), 0.3);
  EXPECT_THROW(bias_torque(vec({1}), vec({1, 2}), 1.0), DimensionError);
}

TEST(FeedbackTerms, TaskTrackingWithIdentityJacobian) {
  // A 6-joint leader whose Jacobian is the identity sees -kp times the body error.
  const Pose actual = Pose::from_rpy(0.0, 0.0, M_PI / 2, {0.3, 0.0, 0.2});
  const Pose cmd = actual * Pose::from_translation(0.0, 0.0, 0.01);
  const JointVector tau = tracking_torque_task(actual, cmd, Jacobian::Identity(6, 6), 2.0, kNoClip, 0.0);
  Vector6d expected = Vector6d::Zero();
  expected[2] = -0.02;
  EXPECT_LT((tau - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FeedbackTerms, GripperTorqueSign) {
  EXPECT_DOUBLE_EQ(gripper_torque(0.8, 0.5, 1.0), 0.8 - 0.5);
  EXPECT_DOUBLE_EQ(gripper_torque(0.2, 0.5, 1.0), 0.2 - 0.5);
}

class ComputeFeedback : public ::testing::Test {
 protected:
  void SetUp() override {
    setup_ = testing::follower_fixture("follower_arm7.yaml");
    const JointVector base = setup_.model->base_pose[0];
    LeaderLimbState ls;
    ls.follower_limb = "arm";
    ls.kind = PayloadKind::kJointPositions;
    ls.q = base;
    ls.q[0] += 0.1;
    ls.q_base = base;
    ls.gripper = 0.6;
    snap_.limbs = {ls};
    signal_.q_cmd = {ls.q};
    signal_.T_cmd = {forward_kinematics(setup_.model->limbs[0], ls.q)};
    signal_.gripper_cmd = {0.6};
    signal_.timestamp = 1.0;
    state_.q_actual = {base};
    state_.T_actual = {forward_kinematics(setup_.model->limbs[0], base)};
    state_.gripper_actual = {0.2};
    state_.timestamp = 1.0;
    cfg_.torque_clip = kNoClip;
  }
  FollowerSetup setup_;
  LeaderSnapshot snap_;
  ControlSignal signal_;
  FollowerState state_;
  FeedbackConfig cfg_;
};

TEST_F(ComputeFeedback, FreshSignalCombinesTerms) {
  const FeedbackTorques f = compute_feedback(snap_, &signal_, &state_, *setup_.model, cfg_, 1.02);
  ASSERT_EQ(f.limbs.size(), 1u);
  const LimbFeedback& l = f.limbs[0];
  EXPECT_FALSE(l.stale);
  EXPECT_DOUBLE_EQ(l.bias[0], -cfg_.bias_gain * 0.1);
  EXPECT_DOUBLE_EQ(l.tracking[0], -cfg_.kp * 0.1);
  EXPECT_DOUBLE_EQ(l.tracking[1], 0.0);
  EXPECT_DOUBLE_EQ(l.gripper, cfg_.gripper_gain * (0.6 - 0.2));
  EXPECT_GT(l.task_error.norm(), 0.0);
}

TEST_F(ComputeFeedback, StaleSignalKeepsOnlyBias) {
  const double late = signal_.timestamp + cfg_.stale_after + 1e-3;
  const FeedbackTorques f = compute_feedback(snap_, &signal_, &state_, *setup_.model, cfg_, late);
  const LimbFeedback& l = f.limbs[0];
  EXPECT_TRUE(l.stale);
  EXPECT_DOUBLE_EQ(l.bias[0], -cfg_.bias_gain * 0.1);
  EXPECT_TRUE(l.tracking.isZero());
  EXPECT_DOUBLE_EQ(l.gripper, 0.0);
  const FeedbackTorques none = compute_feedback(snap_, nullptr, nullptr, *setup_.model, cfg_, 1.0);
  EXPECT_TRUE(none.limbs[0].stale);
  EXPECT_TRUE(none.limbs[0].tracking.isZero());
}

TEST_F(ComputeFeedback, PoseLeaderGetsNoJointTorques) {
  snap_.limbs[0].q.resize(0);
  snap_.limbs[0].q_base.resize(0);
  snap_.limbs[0].kind = PayloadKind::kEefDelta;
  const FeedbackTorques f = compute_feedback(snap_, &signal_, &state_, *setup_.model, cfg_, 1.0);
  EXPECT_EQ(f.limbs[0].bias.size(), 0);
  EXPECT_EQ(f.limbs[0].tracking.size(), 0);
  EXPECT_DOUBLE_EQ(f.limbs[0].gripper, 0.4);
}

class StaticLeader final : public Leader {
 public:
  explicit StaticLeader(LeaderSnapshot s) { snap_.publish(std::move(s)); }
  std::string_view kind() const override { return "static"; }
  std::vector<LeaderLimbInfo> describe() const override { return {}; }
  bool start_signal_check(double) override { return false; }
  LeaderCommand poll(double) override { return {}; }
  std::shared_ptr<const LeaderSnapshot> snapshot() const override { return snap_.get(); }

 private:
  LatestValue<LeaderSnapshot> snap_;
};

TEST_F(ComputeFeedback, LoopPublishesToLeaderAndOutput) {
  StaticLeader leader(snap_);
  LatestValue<ControlSignal> sig;
  LatestValue<FollowerState> st;
  sig.publish(signal_);
  st.publish(state_);
  FeedbackLoop loop(leader, setup_.model, sig, st, cfg_);
  loop.step(1.0);
  loop.step(1.01);
  EXPECT_EQ(loop.publications(), 2u);
  EXPECT_EQ(leader.feedback_count(), 2u);
  EXPECT_EQ(leader.last_feedback()->sequence, 2u);
  EXPECT_EQ(loop.publication_times(), (std::vector<double>{1.0, 1.01}));
}

TEST_F(ComputeFeedback, ThreadRunsAtConfiguredRate) {
  StaticLeader leader(snap_);
  LatestValue<ControlSignal> sig;
  LatestValue<FollowerState> st;
  cfg_.rate = 200.0;
  FeedbackLoop loop(leader, setup_.model, sig, st, cfg_);
  SteadyClock clock;
  loop.start(clock);
  std::this_thread::sleep_for(std::chrono::milliseconds(500));
  loop.stop();
  EXPECT_FALSE(loop.running());
  const auto times = loop.publication_times();
  ASSERT_GE(times.size(), 50u);
  EXPECT_LE(times.size(), 110u);
  const double mean_period = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  EXPECT_NEAR(mean_period, 1.0 / 200.0, 1.5e-3);
}

TEST(FeedbackConfig, Validation) {
  FeedbackConfig c;
  EXPECT_NO_THROW(c.validate());
  c.rate = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.kp = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

}  // namespace
}  // namespace teleop
