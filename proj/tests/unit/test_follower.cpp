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

#include <cmath>

#include "teleop/follower_sim.hpp"
#include "test_support.hpp"

namespace teleop {
namespace {

class FollowerTest : public ::testing::Test {
 protected:
  void SetUp() override { setup_ = testing::follower_fixture("follower_arm7.yaml"); }
  FollowerSim make() { return FollowerSim(setup_.model, setup_.actuator, setup_.model->base_pose); }
  FollowerSetup setup_;
};

TEST_F(FollowerTest, StepRateLimitsEachJoint) {
  FollowerSim f = make();
  const JointVector q0 = setup_.model->base_pose[0];
  const JointVector v = setup_.actuator.velocity_limits[0];
  ControlSignal sig;
  sig.q_cmd = {q0};
  sig.q_cmd[0][0] += 1.0;
  sig.q_cmd[0][1] -= 0.001;
  sig.gripper_cmd = {1.0};
  sig.timestamp = 0.7;
  const FollowerState& s = f.step(sig, 0.02);
  EXPECT_DOUBLE_EQ(s.q_actual[0][0], q0[0] + v[0] * 0.02);
  EXPECT_DOUBLE_EQ(s.q_actual[0][1], q0[1] - 0.001);
  EXPECT_NEAR(s.gripper_actual[0], 1.0 - std::exp(-0.02 / setup_.actuator.gripper_tau), 1e-15);
  EXPECT_DOUBLE_EQ(s.timestamp, 0.7);
  EXPECT_LT(testing::max_abs_diff(s.T_actual[0].matrix(), forward_kinematics(setup_.model->limbs[0], s.q_actual[0]).matrix()),
            1e-15);
}

TEST_F(FollowerTest, StepKeepsWithinLimits) {
  FollowerSim f = make();
  ControlSignal sig;
  sig.q_cmd = {JointVector::Constant(7, 50.0)};
  for (int i = 0; i < 500; ++i) f.step(sig, 0.02);
  EXPECT_TRUE(setup_.model->limbs[0].within_limits(f.state().q_actual[0]));
  EXPECT_EQ(f.state().q_actual[0], setup_.model->limbs[0].upper_limits());
}

TEST_F(FollowerTest, MoveToRespectsVelocityAndLandsExactly) {
  FollowerSim f = make();
  JointVector target = setup_.model->base_pose[0];
  target[0] += 1.2;
  target[3] -= 0.4;
  std::vector<JointVector> seen{f.state().q_actual[0]};
  MoveHooks hooks;
  hooks.on_step = [&](const FollowerState& s) { seen.push_back(s.q_actual[0]); };
  const double min_duration = f.minimum_duration({target});
  const MoveResult r = f.move_to({target}, 0.1, 0.02, 5.0, hooks);
  EXPECT_EQ(f.state().q_actual[0], target);
  EXPECT_EQ(static_cast<std::size_t>(r.steps) + 1, seen.size());
  const JointVector vmax = setup_.actuator.velocity_limits[0];
  for (std::size_t k = 1; k < seen.size(); ++k) {
    const JointVector rate = (seen[k] - seen[k - 1]).cwiseAbs() / 0.02;
    EXPECT_TRUE((rate.array() <= vmax.array() * (1 + 1e-9)).all()) << k;
  }
  EXPECT_NEAR(f.state().timestamp, 5.0 + r.duration, 1e-12);
  EXPECT_GE(r.duration, min_duration);
  EXPECT_GT(min_duration, 0.1);
}

TEST_F(FollowerTest, MoveToHonoursRequestedDuration) {
  FollowerSim f = make();
  JointVector target = setup_.model->base_pose[0];
  target[6] += 0.01;
  const MoveResult r = f.move_to({target}, 1.0, 0.02, 0.0);
  EXPECT_EQ(r.steps, 50);
  EXPECT_NEAR(r.duration, 1.0, 1e-12);
}

TEST_F(FollowerTest, MoveToAbortsBeforeApplyingCollidingStep) {
  FollowerSim f = make();
  JointVector target = setup_.model->base_pose[0];
  target[0] += 0.5;
  int calls = 0;
  MoveHooks hooks;
  hooks.collides = [&](const std::vector<JointVector>&) { return ++calls == 5; };
  EXPECT_THROW(f.move_to({target}, 1.0, 0.02, 0.0, hooks), MoveAborted);
  // Four steps were applied; the fifth was rejected.
  EXPECT_GT(f.state().q_actual[0][0], setup_.model->base_pose[0][0]);
  EXPECT_LT(f.state().q_actual[0][0], target[0]);
  EXPECT_NEAR(f.state().timestamp, 4 * 0.02, 1e-12);
}

TEST_F(FollowerTest, InvalidTargets) {
  FollowerSim f = make();
  EXPECT_THROW(f.move_to({JointVector::Constant(7, 5.0)}, 1.0, 0.02, 0.0), Error);
  EXPECT_THROW(f.move_to({JointVector::Zero(3)}, 1.0, 0.02, 0.0), DimensionError);
  EXPECT_THROW(f.move_to({}, 1.0, 0.02, 0.0), DimensionError);
  EXPECT_EQ(f.move_to(setup_.model->base_pose, 1.0, 0.02, 0.0).steps, 0);
}

TEST_F(FollowerTest, GripperObstacleStopsClosure) {
  FollowerSim f = make();
  f.set_gripper_obstacle(0, 0.4);
  ControlSignal sig;
  sig.q_cmd = setup_.model->base_pose;
  sig.gripper_cmd = {1.0};
  for (int i = 0; i < 100; ++i) f.step(sig, 0.02);
  EXPECT_DOUBLE_EQ(f.state().gripper_actual[0], 0.4);
  f.set_gripper_obstacle(0, std::nullopt);
  for (int i = 0; i < 100; ++i) f.step(sig, 0.02);
  EXPECT_GT(f.state().gripper_actual[0], 0.99);
  EXPECT_THROW(f.set_gripper_obstacle(3, 0.5), std::out_of_range);
}

TEST(Quintic, BoundaryConditionsAndPeakVelocity) {
  EXPECT_DOUBLE_EQ(quintic(0.0), 0.0);
  EXPECT_DOUBLE_EQ(quintic(1.0), 1.0);
  EXPECT_DOUBLE_EQ(quintic(0.5), 0.5);
  const double h = 1e-6;
  EXPECT_NEAR((quintic(0.5 + h) - quintic(0.5 - h)) / (2 * h), 1.875, 1e-6);
  EXPECT_NEAR((quintic(h) - quintic(0.0)) / h, 0.0, 1e-6);
}

}  // namespace
}  // namespace teleop
