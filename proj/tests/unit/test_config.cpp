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

#include "teleop/config.hpp"
#include "test_support.hpp"

namespace teleop {
namespace {

const std::string kFollower = R"(
urdf: planar_2r.urdf
rate: 100
limbs:
  - name: arm
    base_link: base
    tip_link: tip
    base_pose: [0.1, 0.2]
    ik: {damping: 0.01, max_iterations: 50, joint_weights: [0.5, 1.0]}
safety:
  collision_margin: 0.02
  velocity_scale: 0.5
actuator:
  velocity_factor: 3.0
  gripper_tau: 0.2
)";

TEST(FollowerConfig, ParsesEveryField) {
  const FollowerSetup s = parse_follower_config(kFollower, testing::source_dir() / "models");
  EXPECT_DOUBLE_EQ(s.rate, 100.0);
  EXPECT_DOUBLE_EQ(s.safety.dt, 0.01);
  EXPECT_DOUBLE_EQ(s.safety.collision_margin, 0.02);
  ASSERT_EQ(s.model->limbs.size(), 1u);
  EXPECT_EQ(s.model->base_pose[0], Eigen::Vector2d(0.1, 0.2));
  EXPECT_DOUBLE_EQ(s.ik[0].damping, 0.01);
  EXPECT_EQ(s.ik[0].max_iterations, 50);
  EXPECT_EQ(s.ik[0].joint_weights, Eigen::Vector2d(0.5, 1.0));
  // Safety limits are the URDF limits scaled; the actuator is faster than the filter.
  EXPECT_EQ(s.safety.velocity_limits[0], Eigen::Vector2d(0.75, 1.0));
  EXPECT_EQ(s.actuator.velocity_limits[0], Eigen::Vector2d(2.25, 3.0));
  EXPECT_DOUBLE_EQ(s.actuator.gripper_tau, 0.2);
}

TEST(FollowerConfig, RateOverride) {
  const FollowerSetup s = parse_follower_config(kFollower, testing::source_dir() / "models", 25.0);
  EXPECT_DOUBLE_EQ(s.safety.dt, 0.04);
}

TEST(FollowerConfig, Errors) {
  const auto dir = testing::source_dir() / "models";
  auto with = [&](const std::string& from, const std::string& to) {
    std::string text = kFollower;
    text.replace(text.find(from), from.size(), to);
    return text;
  };
  EXPECT_THROW(parse_follower_config(with("urdf: planar_2r.urdf", ""), dir), ConfigError);
  EXPECT_THROW(parse_follower_config(with("planar_2r.urdf", "missing.urdf"), dir), ConfigError);
  EXPECT_THROW(parse_follower_config(with("rate: 100", "rate: -1"), dir), ConfigError);
  EXPECT_THROW(parse_follower_config(with("[0.1, 0.2]", "[0.1]"), dir), ConfigError);
  EXPECT_THROW(parse_follower_config(with("[0.1, 0.2]", "[9.0, 0.2]"), dir), ConfigError);
  EXPECT_THROW(parse_follower_config(with("tip_link: tip", "tip_link: hand"), dir), ChainExtractionError);
  EXPECT_THROW(parse_follower_config(with("[0.5, 1.0]", "[0.5]"), dir), ConfigError);
  EXPECT_THROW(parse_follower_config(with("rate: 100", "rate: [1"), dir), ParseError);
}

TEST(FollowerConfig, ShippedFixturesLoad) {
  for (const char* f : {"follower_arm7.yaml", "follower_dual.yaml", "follower_quad.yaml"}) {
    const FollowerSetup s = testing::follower_fixture(f);
    EXPECT_TRUE(s.warnings.empty()) << f;
    for (const auto& l : s.model->limbs) EXPECT_EQ(l.collision_spheres.size(), 7u) << f;
  }
}

TEST(LeaderConfig, PuppeteerMatchingChainsStreamJoints) {
  const FollowerSetup f = testing::follower_fixture("follower_dual.yaml");
  const LeaderSetup l = load_leader_config(testing::config_path("leader_puppeteer_dual.yaml"), *f.model, f.rate);
  EXPECT_EQ(l.leader->kind(), "virtual_puppeteer");
  for (const auto& info : l.leader->describe()) EXPECT_EQ(info.kind, PayloadKind::kJointPositions);
  EXPECT_DOUBLE_EQ(l.feedback.stale_after, 5.0 / f.rate);
}

TEST(LeaderConfig, Ur5LeaderStreamsEefDeltas) {
  const FollowerSetup f = testing::follower_fixture("follower_dual.yaml");
  const LeaderSetup l = load_leader_config(testing::config_path("leader_ur5_dual.yaml"), *f.model, f.rate);
  const auto info = l.leader->describe();
  ASSERT_EQ(info.size(), 2u);
  EXPECT_EQ(info[0].follower_limb, "left");
  EXPECT_EQ(info[0].kind, PayloadKind::kEefDelta);
}

TEST(LeaderConfig, ConsoleAndErrors) {
  const FollowerSetup f = testing::follower_fixture("follower_dual.yaml");
  const LeaderSetup l = load_leader_config(testing::config_path("leader_console.yaml"), *f.model, f.rate);
  EXPECT_EQ(l.leader->kind(), "console");
  const auto dir = testing::source_dir() / "configs";
  EXPECT_THROW(parse_leader_config("device: glove\nlimbs: []\n", dir, *f.model, 50), ConfigError);
  EXPECT_THROW(parse_leader_config("device: console\nlimbs: [{name: x, follower: nowhere}]\n", dir, *f.model, 50),
               MappingError);
  EXPECT_THROW(parse_leader_config("device: console\nlimbs: [{name: x, follower: left}, {name: y, follower: left}]\n",
                                   dir, *f.model, 50),
               MappingError);
  EXPECT_THROW(parse_leader_config("device: console\nlimbs: [{name: x}]\nfeedback: {rate: 0}\n", dir, *f.model, 50),
               ConfigError);
}

TEST(EnvConfig, ParsesService) {
  const EnvConfig e = load_env_config(testing::config_path("env_sim.yaml"));
  EXPECT_EQ(e.env, "sim");
  EXPECT_TRUE(e.realtime);
  EXPECT_TRUE(e.service.enabled);
  EXPECT_EQ(e.service.port, 8700);
  EXPECT_FALSE(load_env_config(testing::config_path("env_headless.yaml")).realtime);
  EXPECT_THROW(parse_env_config("env: hardware\n", "."), ConfigError);
}

}  // namespace
}  // namespace teleop
