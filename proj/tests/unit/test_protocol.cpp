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

#include "teleop/json_codec.hpp"
#include "teleop/protocol.hpp"
#include "test_support.hpp"

namespace teleop {
namespace {

using protocol::json;
using protocol::Kind;

TEST(Protocol, EncodeDecodeRoundTrip) {
  for (Kind k : {Kind::kStateUpdate, Kind::kLeaderInput, Kind::kSessionEvent, Kind::kFeedbackUpdate, Kind::kModelInfo,
                 Kind::kError}) {
    const protocol::WireMessage m{k, 42, json{{"x", 1.5}, {"y", {1, 2}}}};
    EXPECT_EQ(protocol::decode(protocol::encode(m)), m);
    EXPECT_EQ(protocol::kind_from_string(protocol::to_string(k)), k);
  }
}

TEST(Protocol, DecodeRejectsMalformedMessages) {
  for (const char* bad : {"not json", "[]", R"({"seq":1,"payload":{}})", R"({"kind":"bogus","seq":1,"payload":{}})",
                          R"({"kind":"leader_input","payload":{}})", R"({"kind":"leader_input","seq":-1,"payload":{}})",
                          R"({"kind":"leader_input","seq":1})", R"({"kind":"leader_input","seq":1,"payload":[]})",
                          R"({"kind":3,"seq":1,"payload":{}})"}) {
    EXPECT_THROW(protocol::decode(bad), protocol::ProtocolError) << bad;
  }
}

TEST(Protocol, LeaderInputRoundTrip) {
  ConsoleInput in;
  in.limb = "left";
  in.delta_translation = {0.01, -0.02, 0.03};
  in.delta_rotation = Eigen::Quaterniond(Eigen::AngleAxisd(0.2, Eigen::Vector3d(0, 1, 1).normalized()));
  in.gripper = 0.4;
  const ConsoleInput out = protocol::parse_leader_input(protocol::leader_input_payload(in));
  EXPECT_EQ(out.event, ConsoleInput::Event::kDrag);
  EXPECT_EQ(out.limb, "left");
  EXPECT_EQ(out.delta_translation, in.delta_translation);
  EXPECT_LT((out.delta_rotation.coeffs() - in.delta_rotation.coeffs()).norm(), 1e-15);
  EXPECT_EQ(out.gripper, 0.4);
  EXPECT_EQ(protocol::parse_leader_input({{"event", "start"}}).event, ConsoleInput::Event::kStart);
  EXPECT_EQ(protocol::parse_leader_input({{"event", "end"}}).event, ConsoleInput::Event::kEnd);
}

TEST(Protocol, LeaderInputRejectsBadPayloads) {
  EXPECT_THROW(protocol::parse_leader_input({{"event", "jump"}}), protocol::ProtocolError);
  EXPECT_THROW(protocol::parse_leader_input({{"event", "drag"}}), protocol::ProtocolError);
  EXPECT_THROW(protocol::parse_leader_input({{"limb", "left"}, {"delta_translation", {1, 2}}}), protocol::ProtocolError);
  EXPECT_THROW(protocol::parse_leader_input({{"limb", "left"}, {"delta_translation", "up"}}), protocol::ProtocolError);
  EXPECT_THROW(protocol::parse_leader_input({{"limb", "left"}, {"gripper", "closed"}}), protocol::ProtocolError);
  EXPECT_THROW(protocol::parse_leader_input({{"limb", "left"}, {"delta_rotation_quat", {0, 0, 1}}}),
               protocol::ProtocolError);
}

TEST(Protocol, ModelInfoDescribesEveryLimb) {
  const auto setup = testing::follower_fixture("follower_dual.yaml");
  const json info = protocol::model_info(*setup.model);
  EXPECT_EQ(info["schema_version"], protocol::kSchemaVersion);
  ASSERT_EQ(info["limbs"].size(), 2u);
  const json& left = info["limbs"][0];
  EXPECT_EQ(left["name"], "left");
  EXPECT_EQ(left["joints"].size(), 7u);
  EXPECT_EQ(left["joints"][0]["type"], "revolute");
  EXPECT_EQ(left["spheres"].size(), 7u);
  EXPECT_EQ(left["gripper"], "left_gripper");
  EXPECT_EQ(left["base_in_root"]["quaternion"].size(), 4u);
}

TEST(Protocol, StateUpdateCarriesFramesInRootFrame) {
  const auto setup = testing::follower_fixture("follower_dual.yaml");
  const RobotModel& m = *setup.model;
  EngineSnapshot snap;
  snap.state = SessionState::kRunning;
  snap.follower.q_actual = m.base_pose;
  snap.follower.gripper_actual = {0.1, 0.2};
  for (std::size_t l = 0; l < 2; ++l) snap.follower.T_actual.push_back(forward_kinematics(m.limbs[l], m.base_pose[l]));
  const json s = protocol::state_update(snap, m);
  EXPECT_EQ(s["state"], "Running");
  const json& right = s["limbs"][1];
  EXPECT_TRUE(right["q_cmd"].is_null());
  const auto& frames = right["frames"];
  ASSERT_EQ(frames.size(), 8u);
  const Eigen::Vector3d tip = m.limbs[1].base_in_root * snap.follower.T_actual[1].translation();
  const Eigen::VectorXd last = codec::vector_from_json(frames.back());
  EXPECT_LT((last - tip).norm(), 1e-12);
  const Pose wire = codec::pose_from_wire(right["T_actual"]);
  EXPECT_LT(testing::max_abs_diff(wire.matrix(), snap.follower.T_actual[1].matrix()), 1e-12);
}

TEST(Protocol, FeedbackAndEventsSerialize) {
  FeedbackTorques f;
  f.sequence = 9;
  LimbFeedback lf;
  lf.limb = "left";
  lf.bias = JointVector::Constant(3, 0.1);
  lf.tracking = JointVector::Constant(3, -0.2);
  lf.gripper = 0.3;
  f.limbs = {lf};
  const FeedbackTorques back = codec::feedback_from_json(protocol::feedback_update(f));
  EXPECT_EQ(back.sequence, 9u);
  EXPECT_EQ(back.limbs[0].tracking, lf.tracking);
  const json e = protocol::session_event({1.5, SessionState::kWaitingForStart, SessionState::kApproaching, "start"});
  EXPECT_EQ(e["from"], "WaitingForStart");
  EXPECT_EQ(e["to"], "Approaching");
  EXPECT_TRUE(protocol::error_payload("x")["in_reply_to"].is_null());
  EXPECT_EQ(protocol::error_payload("x", 4)["in_reply_to"], 4);
}

}  // namespace
}  // namespace teleop
