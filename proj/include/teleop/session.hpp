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

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "teleop/clock.hpp"
#include "teleop/feedback.hpp"
#include "teleop/follower_sim.hpp"
#include "teleop/leader.hpp"
#include "teleop/mailbox.hpp"
#include "teleop/pipeline.hpp"
#include "teleop/recorder.hpp"

namespace teleop {

enum class SessionState { kInitializing, kAtBasePose, kWaitingForStart, kApproaching, kRunning, kResetting, kShutdown };

std::string_view to_string(SessionState s);

/// Transition table. Besides the main cycle, an approach that would collide returns to
/// WaitingForStart, and any state may go to Shutdown on cancellation.
bool is_legal_transition(SessionState from, SessionState to);

struct SessionEvent {
  double time = 0.0;
  SessionState from = SessionState::kInitializing;
  SessionState to = SessionState::kInitializing;
  std::string reason;
};

/// State the service streams to clients.
struct EngineSnapshot {
  SessionState state = SessionState::kInitializing;
  FollowerState follower;
  std::optional<ControlSignal> signal;
  bool recording = false;
  double time = 0.0;
};

struct SessionOptions {
  double rate = 50.0;
  /// Minimum duration of the approach and reset moves (s).
  double approach_duration = 1.0;
  double reset_duration = 1.0;
  std::optional<RecorderConfig> record;
  /// Run the feedback loop on its own thread (realtime clocks only).
  bool feedback_thread = true;
};

/// Everything a running engine exposes to observers. Safe to call from any thread.
class EngineView {
 public:
  virtual ~EngineView() = default;
  virtual const RobotModel& model() const = 0;
  virtual std::shared_ptr<const EngineSnapshot> engine_snapshot() const = 0;
  virtual std::shared_ptr<const FeedbackTorques> feedback_snapshot() const = 0;
  virtual std::uint64_t feedback_version() const = 0;
  /// Events with index >= first.
  virtual std::vector<SessionEvent> events_since(std::size_t first) const = 0;
  /// Non-null when the leader is a console leader.
  virtual ConsoleLeader* console() const = 0;
};

struct Observation {
  SessionState state = SessionState::kInitializing;
  FollowerState follower;
  std::optional<ControlSignal> signal;
  std::shared_ptr<const FeedbackTorques> feedback;
  double time = 0.0;
};

/// The teleoperation session state machine. tick() advances it by one step; run() ticks
/// until Shutdown or cancellation. Blocking moves (approach, reset) run inside one tick.
class Session final : public EngineView {
 public:
  Session(std::shared_ptr<const RobotModel> model, std::vector<JointVector> base_pose, TeleopPipeline pipeline,
          ActuatorConfig actuator, std::unique_ptr<Leader> leader, FeedbackConfig feedback, Clock& clock,
          SessionOptions options = {});
  ~Session() override;

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  SessionState state() const { return state_; }
  void tick();
  /// Ticks until Shutdown, cancellation or max_ticks; cancellation parks the follower at base.
  SessionState run(const CancellationToken& cancel, std::optional<std::uint64_t> max_ticks = std::nullopt);
  /// Parks at the base pose and enters Shutdown.
  void shutdown(const std::string& reason);

  // Stepper interface.
  Observation observe() const;
  /// One Running tick driven by cmd instead of the leader. Requires state Running.
  Observation act(const LeaderCommand& cmd);

  const FollowerSim& follower() const { return follower_; }
  const TeleopPipeline& pipeline() const { return pipeline_; }
  Leader& leader() { return *leader_; }
  const Recorder* recorder() const { return recorder_.get(); }
  FeedbackLoop& feedback_loop() { return *feedback_; }
  const std::vector<JointVector>& base_pose() const { return base_; }
  std::vector<SessionEvent> events() const { return events_since(0); }
  const std::vector<std::string>& warnings() const { return warnings_; }
  std::uint64_t ticks() const { return ticks_; }
  double dt() const { return dt_; }
  /// Final approach configuration of the current session.
  const std::vector<JointVector>& approach_pose() const { return approach_q_; }

  // EngineView
  const RobotModel& model() const override { return *model_; }
  std::shared_ptr<const EngineSnapshot> engine_snapshot() const override { return engine_.get(); }
  std::shared_ptr<const FeedbackTorques> feedback_snapshot() const override { return feedback_->output().get(); }
  std::uint64_t feedback_version() const override { return feedback_->output().version(); }
  std::vector<SessionEvent> events_since(std::size_t first) const override;
  ConsoleLeader* console() const override { return console_; }

 private:
  void transition(SessionState to, const std::string& reason);
  void wait_tick();
  void do_waiting();
  void do_approach();
  void do_running();
  void run_step(const LeaderCommand& cmd);
  void do_reset(const std::string& reason);
  void move_follower(const std::vector<JointVector>& target, double duration, bool check_collision);
  void publish();

  std::shared_ptr<const RobotModel> model_;
  std::vector<JointVector> base_;
  TeleopPipeline pipeline_;
  FollowerSim follower_;
  std::unique_ptr<Leader> leader_;
  ConsoleLeader* console_ = nullptr;
  Clock& clock_;
  SessionOptions options_;
  double dt_;
  double next_tick_ = 0.0;
  std::uint64_t ticks_ = 0;
  SessionState state_ = SessionState::kInitializing;
  std::vector<JointVector> prev_;
  std::vector<JointVector> approach_q_;
  std::optional<ControlSignal> last_signal_;
  std::unique_ptr<Recorder> recorder_;
  LatestValue<ControlSignal> signal_box_;
  LatestValue<FollowerState> state_box_;
  LatestValue<EngineSnapshot> engine_;
  std::unique_ptr<FeedbackLoop> feedback_;
  mutable std::mutex events_mutex_;
  std::vector<SessionEvent> events_;
  std::vector<std::string> warnings_;
  std::size_t flushed_warnings_ = 0;
};

}  // namespace teleop
