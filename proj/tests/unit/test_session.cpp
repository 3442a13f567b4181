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
#include <set>

#include "teleop/clock.hpp"
#include "teleop/ik_solver.hpp"
#include "teleop/session.hpp"
#include "test_support.hpp"

namespace teleop {
namespace {

using S = SessionState;

LeaderCommand joint_command(const RobotModel& m, const std::vector<JointVector>& q, double gripper = 0.0) {
  LeaderCommand c;
  for (std::size_t l = 0; l < m.limbs.size(); ++l) c.limbs.push_back({m.limbs[l].name, JointPositions{q[l]}, gripper});
  return c;
}

// n commands sweeping joint 1 of every limb by up to `amp` around the base pose.
std::vector<LeaderCommand> sweep(const RobotModel& m, int n, double amp) {
  std::vector<LeaderCommand> out;
  for (int k = 0; k < n; ++k) {
    std::vector<JointVector> q = m.base_pose;
    for (auto& v : q) v[0] += amp * std::sin(2 * M_PI * k / n);
    out.push_back(joint_command(m, q, 0.5));
  }
  return out;
}

std::vector<LeaderLimbInfo> joint_info(const RobotModel& m) {
  std::vector<LeaderLimbInfo> info;
  for (const auto& l : m.limbs) info.push_back({l.name, PayloadKind::kJointPositions, l.dof()});
  return info;
}

struct Rig {
  FollowerSetup setup = testing::follower_fixture("follower_dual.yaml");
  ManualClock clock;

  std::unique_ptr<Session> make(std::unique_ptr<Leader> leader, SessionOptions opts = {}) {
    opts.approach_duration = 0.2;
    opts.reset_duration = 0.2;
    TeleopPipeline pipeline(setup.model, setup.ik, setup.safety);
    return std::make_unique<Session>(setup.model, setup.model->base_pose, std::move(pipeline), setup.actuator,
                                     std::move(leader), FeedbackConfig{}, clock, opts);
  }
};

std::vector<std::pair<S, S>> edges(const Session& s) {
  std::vector<std::pair<S, S>> out;
  for (const auto& e : s.events()) out.emplace_back(e.from, e.to);
  return out;
}

TEST(SessionStates, TransitionTable) {
  const S all[] = {S::kInitializing, S::kAtBasePose, S::kWaitingForStart, S::kApproaching,
                   S::kRunning,      S::kResetting,  S::kShutdown};
  const std::set<std::pair<S, S>> legal = {
      {S::kInitializing, S::kAtBasePose}, {S::kAtBasePose, S::kWaitingForStart},
      {S::kWaitingForStart, S::kApproaching}, {S::kApproaching, S::kRunning},
      {S::kApproaching, S::kWaitingForStart}, {S::kRunning, S::kResetting},
      {S::kResetting, S::kWaitingForStart}};
  for (S a : all) {
    for (S b : all) {
      const bool expected = legal.count({a, b}) || (b == S::kShutdown && a != S::kShutdown);
      EXPECT_EQ(is_legal_transition(a, b), expected) << to_string(a) << " -> " << to_string(b);
    }
  }
}

TEST(Session, TwoResetCyclesVisitEveryTransition) {
  Rig rig;
  const RobotModel& m = *rig.setup.model;
  auto leader = std::make_unique<ScriptedLeader>(
      joint_info(m), std::vector<ScriptedLeader::Session>{{3, sweep(m, 25, 0.2)}, {2, sweep(m, 40, -0.3)}});
  auto session = rig.make(std::move(leader));
  CancellationToken cancel;
  EXPECT_EQ(session->run(cancel, 10000), S::kShutdown);
  const std::vector<std::pair<S, S>> expected = {
      {S::kInitializing, S::kAtBasePose}, {S::kAtBasePose, S::kWaitingForStart},
      {S::kWaitingForStart, S::kApproaching}, {S::kApproaching, S::kRunning},
      {S::kRunning, S::kResetting}, {S::kResetting, S::kWaitingForStart},
      {S::kWaitingForStart, S::kApproaching}, {S::kApproaching, S::kRunning},
      {S::kRunning, S::kResetting}, {S::kResetting, S::kWaitingForStart},
      {S::kWaitingForStart, S::kShutdown}};
  EXPECT_EQ(edges(*session), expected);
  EXPECT_EQ(session->follower().state().q_actual, m.base_pose);
  // Simulated time advances one period per loop tick.
  const auto ev = session->events();
  for (std::size_t i = 1; i < ev.size(); ++i) EXPECT_GE(ev[i].time, ev[i - 1].time);
  EXPECT_GT(rig.clock.now(), (25 + 40) * session->dt());
}

TEST(Session, CollidingApproachReturnsToWaiting) {
  Rig rig;
  const RobotModel& m = *rig.setup.model;
  std::vector<JointVector> q;
  for (std::size_t l = 0; l < 2; ++l) {
    const double sign = m.limbs[l].base_in_root.translation().y() > 0 ? -1.0 : 1.0;
    const Pose goal = Pose::from_translation(0, sign * 0.34, 0) * forward_kinematics(m.limbs[l], m.base_pose[l]);
    q.push_back(solve(m.limbs[l], goal, m.base_pose[l], rig.setup.ik[l]).q_solution);
  }
  auto leader = std::make_unique<ScriptedLeader>(
      joint_info(m), std::vector<ScriptedLeader::Session>{{0, {joint_command(m, q)}}, {0, sweep(m, 5, 0.1)}});
  auto session = rig.make(std::move(leader));
  CancellationToken cancel;
  session->run(cancel, 10000);
  const auto e = edges(*session);
  ASSERT_GE(e.size(), 5u);
  EXPECT_EQ(e[3], std::make_pair(S::kApproaching, S::kWaitingForStart));
  EXPECT_EQ(e[4], std::make_pair(S::kWaitingForStart, S::kApproaching));
  EXPECT_EQ(e[5], std::make_pair(S::kApproaching, S::kRunning));
  EXPECT_FALSE(session->warnings().empty());
  // The aborted approach stopped before contact.
  EXPECT_EQ(session->events().back().to, S::kShutdown);
}

TEST(Session, NeverStartingLeaderWaitsUntilCancelled) {
  Rig rig;
  LimbMapping mapping = LimbMapping::identity({"left", "right"});
  auto session = rig.make(std::make_unique<ConsoleLeader>(mapping));
  CancellationToken cancel;
  EXPECT_EQ(session->run(cancel, 200), S::kWaitingForStart);
  EXPECT_EQ(session->ticks(), 200u);
  EXPECT_NEAR(rig.clock.now(), 198 * session->dt(), 1e-9);
  cancel.request();
  EXPECT_EQ(session->run(cancel), S::kShutdown);
  EXPECT_EQ(session->events().back().reason, "cancelled");
}

TEST(Session, ConsoleDrivesThroughStartAndEnd) {
  Rig rig;
  LimbMapping mapping = LimbMapping::identity({"left", "right"});
  auto console = std::make_unique<ConsoleLeader>(mapping);
  ConsoleLeader* c = console.get();
  auto session = rig.make(std::move(console));
  CancellationToken cancel;
  session->run(cancel, 5);
  ASSERT_EQ(session->state(), S::kWaitingForStart);
  c->push({ConsoleInput::Event::kStart, "", {}, Eigen::Quaterniond::Identity(), {}});
  session->tick();
  EXPECT_EQ(session->state(), S::kApproaching);
  session->tick();
  EXPECT_EQ(session->state(), S::kRunning);
  ConsoleInput drag;
  drag.limb = "left";
  drag.delta_translation = {0.0, 0.0, 0.002};
  for (int i = 0; i < 10; ++i) {
    c->push(drag);
    session->tick();
  }
  const Pose t0 = forward_kinematics(rig.setup.model->limbs[0], rig.setup.model->base_pose[0]);
  const Pose now = session->follower().state().T_actual[0];
  // Drags are expressed in the EEF frame captured at the session start.
  const Eigen::Vector3d expected = t0.rotation() * Eigen::Vector3d(0.0, 0.0, 0.02);
  EXPECT_LT((now.translation() - t0.translation() - expected).norm(), 2e-3);
  c->push({ConsoleInput::Event::kEnd, "", {}, Eigen::Quaterniond::Identity(), {}});
  session->tick();
  EXPECT_EQ(session->state(), S::kResetting);
  session->tick();
  EXPECT_EQ(session->state(), S::kWaitingForStart);
}

TEST(Session, DisconnectWhileRunningResets) {
  Rig rig;
  const RobotModel& m = *rig.setup.model;
  std::vector<PuppeteerLimb> limbs;
  for (std::size_t l = 0; l < 2; ++l) limbs.push_back({m.limbs[l].name, m.limbs[l], m.base_pose[l], {0.0, 1.0}});
  auto p = std::make_unique<VirtualPuppeteer>(limbs, LimbMapping::identity({"left", "right"}), m);
  VirtualPuppeteer* puppet = p.get();
  puppet->push({m.base_pose, {1.0, 1.0}});
  auto session = rig.make(std::move(p));
  CancellationToken cancel;
  for (int i = 0; i < 200 && session->state() != S::kRunning; ++i) session->tick();
  ASSERT_EQ(session->state(), S::kRunning);
  puppet->disconnect();
  session->tick();
  EXPECT_EQ(session->state(), S::kResetting);
  EXPECT_EQ(session->events().back().reason, "leader disconnected");
}

TEST(Session, RandomScriptsOnlyProduceLegalChains) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    Rig rig;
    const RobotModel& m = *rig.setup.model;
    std::uniform_int_distribution<int> waits(0, 4), len(1, 20), count(0, 3);
    std::uniform_real_distribution<double> amp(-0.4, 0.4);
    std::vector<ScriptedLeader::Session> sessions;
    for (int k = count(rng); k > 0; --k) sessions.push_back({waits(rng), sweep(m, len(rng), amp(rng))});
    auto session = rig.make(std::make_unique<ScriptedLeader>(joint_info(m), sessions));
    CancellationToken cancel;
    EXPECT_EQ(session->run(cancel, 5000), S::kShutdown);
    S prev = S::kInitializing;
    int runs = 0;
    for (const auto& e : session->events()) {
      EXPECT_EQ(e.from, prev);
      EXPECT_TRUE(is_legal_transition(e.from, e.to));
      prev = e.to;
      runs += e.to == S::kRunning;
    }
    EXPECT_EQ(runs, static_cast<int>(sessions.size()));
  }
}

TEST(Session, RecordsOneFilePerRunningInterval) {
  Rig rig;
  testing::TempDir dir;
  const RobotModel& m = *rig.setup.model;
  SessionOptions opts;
  opts.record = RecorderConfig{dir / "rec.jsonl", {}, 50};
  auto session = rig.make(std::make_unique<ScriptedLeader>(
                              joint_info(m), std::vector<ScriptedLeader::Session>{{0, sweep(m, 10, 0.1)},
                                                                                  {0, sweep(m, 7, 0.1)}}),
                          opts);
  CancellationToken cancel;
  session->run(cancel, 5000);
  ASSERT_NE(session->recorder(), nullptr);
  ASSERT_EQ(session->recorder()->files().size(), 2u);
  EXPECT_EQ(read_recording(session->recorder()->files()[0]).commands.size(), 10u);
  EXPECT_EQ(read_recording(session->recorder()->files()[1]).commands.size(), 7u);
}

TEST(Session, ActStepsOnlyWhileRunning) {
  Rig rig;
  const RobotModel& m = *rig.setup.model;
  auto session = rig.make(std::make_unique<ScriptedLeader>(
      joint_info(m), std::vector<ScriptedLeader::Session>{{0, sweep(m, 100, 0.1)}}));
  EXPECT_THROW(session->act(joint_command(m, m.base_pose)), Error);
  while (session->state() != S::kRunning) session->tick();
  std::vector<JointVector> q = m.base_pose;
  q[1][2] += 0.01;
  const Observation o = session->act(joint_command(m, q));
  EXPECT_EQ(o.state, S::kRunning);
  ASSERT_TRUE(o.signal);
  EXPECT_EQ(o.signal->q_cmd[1], q[1]);
  EXPECT_EQ(o.follower.q_actual[1], q[1]);
  // Scripted leaders publish no leader state, so there is nothing to feed back.
  EXPECT_FALSE(o.feedback);
}

}  // namespace
}  // namespace teleop
