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

#include "teleop/session.hpp"

#include <algorithm>

namespace teleop {

std::string_view to_string(SessionState s) {
  switch (s) {
    case SessionState::kInitializing:
      return "Initializing";
    case SessionState::kAtBasePose:
      return "AtBasePose";
    case SessionState::kWaitingForStart:
      return "WaitingForStart";
    case SessionState::kApproaching:
      return "Approaching";
    case SessionState::kRunning:
      return "Running";
    case SessionState::kResetting:
      return "Resetting";
    case SessionState::kShutdown:
      return "Shutdown";
  }
  return "Unknown";
}

bool is_legal_transition(SessionState from, SessionState to) {
  using S = SessionState;
  if (to == S::kShutdown) return from != S::kShutdown;
  switch (from) {
    case S::kInitializing:
      return to == S::kAtBasePose;
    case S::kAtBasePose:
      return to == S::kWaitingForStart;
    case S::kWaitingForStart:
      return to == S::kApproaching;
    case S::kApproaching:
      return to == S::kRunning || to == S::kWaitingForStart;
    case S::kRunning:
      return to == S::kResetting;
    case S::kResetting:
      return to == S::kWaitingForStart;
    case S::kShutdown:
      return false;
  }
  return false;
}

namespace {

std::vector<RecordedLimb> recorded_limbs(const RobotModel& model, const std::vector<LeaderLimbInfo>& info) {
  std::vector<RecordedLimb> out;
  for (const auto& limb : model.limbs) {
    RecordedLimb r;
    r.name = limb.name;
    r.joints = limb.joint_names();
    for (const auto& li : info) {
      if (li.follower_limb == limb.name) r.payload = li.kind;
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

Session::Session(std::shared_ptr<const RobotModel> model, std::vector<JointVector> base_pose, TeleopPipeline pipeline,
                 ActuatorConfig actuator, std::unique_ptr<Leader> leader, FeedbackConfig feedback, Clock& clock,
                 SessionOptions options)
    : model_(std::move(model)),
      base_(std::move(base_pose)),
      pipeline_(std::move(pipeline)),
      follower_(model_, std::move(actuator), base_),
      leader_(std::move(leader)),
      clock_(clock),
      options_(std::move(options)) {
  if (!leader_) throw ConfigError("session: no leader");
  if (!(options_.rate > 0.0)) throw ConfigError("session: loop rate must be positive");
  dt_ = 1.0 / options_.rate;
  pipeline_.check_leader(leader_->describe());
  console_ = dynamic_cast<ConsoleLeader*>(leader_.get());
  prev_ = base_;
  approach_q_ = base_;
  if (options_.record) {
    recorder_ = std::make_unique<Recorder>(*options_.record, recorded_limbs(*model_, leader_->describe()));
  }
  feedback_ = std::make_unique<FeedbackLoop>(*leader_, model_, signal_box_, state_box_, feedback);
  if (clock_.realtime() && options_.feedback_thread) feedback_->start(clock_);
  next_tick_ = clock_.now();
  state_box_.publish(follower_.state());
  publish();
}

Session::~Session() {
  feedback_->stop();
  if (recorder_) recorder_->end_interval();
}

std::vector<SessionEvent> Session::events_since(std::size_t first) const {
  std::lock_guard lock(events_mutex_);
  if (first >= events_.size()) return {};
  return {events_.begin() + static_cast<std::ptrdiff_t>(first), events_.end()};
}

void Session::publish() {
  EngineSnapshot snap;
  snap.state = state_;
  snap.follower = follower_.state();
  snap.signal = last_signal_;
  snap.recording = recorder_ && recorder_->in_interval();
  snap.time = clock_.now();
  engine_.publish(std::move(snap));
}

void Session::transition(SessionState to, const std::string& reason) {
  if (!is_legal_transition(state_, to)) {
    throw Error("session: illegal transition " + std::string(to_string(state_)) + " -> " + std::string(to_string(to)));
  }
  if (state_ == SessionState::kRunning && recorder_) recorder_->end_interval();
  {
    std::lock_guard lock(events_mutex_);
    events_.push_back({clock_.now(), state_, to, reason});
  }
  state_ = to;
  if (recorder_) {
    recorder_->flush();
    const auto& w = recorder_->warnings();
    for (; flushed_warnings_ < w.size(); ++flushed_warnings_) warnings_.push_back(w[flushed_warnings_]);
  }
  publish();
}

void Session::wait_tick() {
  next_tick_ += dt_;
  const double now = clock_.now();
  if (next_tick_ < now) next_tick_ = now;
  clock_.sleep_until(next_tick_);
}

void Session::move_follower(const std::vector<JointVector>& target, double duration, bool check_collision) {
  MoveHooks hooks;
  if (check_collision) {
    hooks.collides = [this](const std::vector<JointVector>& q) {
      return !check_self_collision(*model_, q, pipeline_.safety()).empty();
    };
  }
  hooks.on_step = [this](const FollowerState& st) {
    clock_.sleep_until(st.timestamp);
    state_box_.publish(st);
    publish();
    if (!feedback_->running()) feedback_->step(clock_.now());
  };
  follower_.move_to(target, duration, dt_, clock_.now(), hooks);
  state_box_.publish(follower_.state());
  next_tick_ = clock_.now();
}

void Session::tick() {
  switch (state_) {
    case SessionState::kInitializing:
      move_follower(base_, 0.0, false);
      transition(SessionState::kAtBasePose, "initialized");
      break;
    case SessionState::kAtBasePose:
      transition(SessionState::kWaitingForStart, "at base pose");
      break;
    case SessionState::kWaitingForStart:
      do_waiting();
      break;
    case SessionState::kApproaching:
      do_approach();
      break;
    case SessionState::kRunning:
      do_running();
      break;
    case SessionState::kResetting:
      do_reset("session ended");
      break;
    case SessionState::kShutdown:
      return;
  }
  ++ticks_;
  if (!feedback_->running()) feedback_->step(clock_.now());
}

void Session::do_waiting() {
  if (leader_->finished()) {
    transition(SessionState::kShutdown, "leader finished");
    return;
  }
  if (leader_->start_signal_check(clock_.now())) {
    pipeline_.capture_initial(follower_.state());
    transition(SessionState::kApproaching, "start signal");
    return;
  }
  wait_tick();
}

void Session::do_approach() {
  const double now = clock_.now();
  LeaderCommand cmd;
  try {
    cmd = leader_->poll(now);
  } catch (const DeviceDisconnected&) {
    leader_->end_session(now);
    transition(SessionState::kWaitingForStart, "leader disconnected during approach");
    return;
  }
  JointTargets targets = pipeline_.interpret(cmd, follower_.state());
  for (std::size_t l = 0; l < targets.q.size(); ++l) {
    if (!targets.ik_converged[l]) {
      warnings_.push_back("approach: mirror pose of limb '" + model_->limbs[l].name +
                          "' not reached by IK, using best effort");
    }
    targets.q[l] = model_->limbs[l].clamp(targets.q[l]);
  }
  try {
    move_follower(targets.q, options_.approach_duration, true);
  } catch (const MoveAborted& e) {
    next_tick_ = clock_.now();
    state_box_.publish(follower_.state());
    leader_->end_session(clock_.now());
    warnings_.push_back(e.what());
    transition(SessionState::kWaitingForStart, std::string("approach aborted: ") + e.what());
    return;
  }
  approach_q_ = follower_.state().q_actual;
  prev_ = approach_q_;
  leader_->on_running(clock_.now());
  if (recorder_) recorder_->begin_interval(clock_.now());
  transition(SessionState::kRunning, "approach complete");
}

void Session::run_step(const LeaderCommand& cmd) {
  const double now = clock_.now();
  ControlSignal signal = pipeline_.process(cmd, follower_.state(), prev_);
  signal.timestamp = now;
  follower_.step(signal, dt_);
  prev_ = signal.q_cmd;
  signal_box_.publish(signal);
  state_box_.publish(follower_.state());
  if (recorder_) {
    StepRecord rec;
    rec.timestamp = now;
    rec.command = cmd;
    rec.signal = signal;
    rec.state = follower_.state();
    rec.feedback = feedback_->output().get();
    recorder_->record(rec);
  }
  last_signal_ = std::move(signal);
  publish();
  if (cmd.end_requested) {
    transition(SessionState::kResetting, "end requested");
  } else {
    wait_tick();
  }
}

void Session::do_running() {
  LeaderCommand cmd;
  try {
    cmd = leader_->poll(clock_.now());
  } catch (const DeviceDisconnected&) {
    warnings_.push_back("leader disconnected, resetting");
    transition(SessionState::kResetting, "leader disconnected");
    return;
  }
  run_step(cmd);
}

void Session::do_reset(const std::string& /*reason*/) {
  leader_->end_session(clock_.now());
  move_follower(base_, options_.reset_duration, false);
  prev_ = base_;
  last_signal_.reset();
  transition(SessionState::kWaitingForStart, "at base pose");
}

void Session::shutdown(const std::string& reason) {
  if (state_ == SessionState::kShutdown) return;
  if (state_ == SessionState::kRunning || state_ == SessionState::kApproaching) leader_->end_session(clock_.now());
  if (recorder_) recorder_->end_interval();
  move_follower(base_, options_.reset_duration, false);
  prev_ = base_;
  transition(SessionState::kShutdown, reason);
}

SessionState Session::run(const CancellationToken& cancel, std::optional<std::uint64_t> max_ticks) {
  while (state_ != SessionState::kShutdown) {
    if (cancel.requested()) {
      shutdown("cancelled");
      break;
    }
    if (max_ticks && ticks_ >= *max_ticks) break;
    tick();
  }
  return state_;
}

Observation Session::observe() const {
  Observation o;
  o.state = state_;
  o.follower = follower_.state();
  o.signal = last_signal_;
  o.feedback = feedback_->output().get();
  o.time = clock_.now();
  return o;
}

Observation Session::act(const LeaderCommand& cmd) {
  if (state_ != SessionState::kRunning) throw Error("act: session is not Running");
  LeaderCommand c = cmd;
  c.timestamp = clock_.now();
  run_step(c);
  ++ticks_;
  if (!feedback_->running()) feedback_->step(clock_.now());
  return observe();
}

}  // namespace teleop
