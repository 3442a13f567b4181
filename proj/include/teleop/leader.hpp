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
#include <deque>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "teleop/mailbox.hpp"
#include "teleop/robot_model.hpp"
#include "teleop/types.hpp"

namespace teleop {

/// Delta of Tt from T0 (T0^{-1} Tt) with its translation scaled by s; the rotation is never scaled.
Pose compute_delta(const Pose& t0, const Pose& tt, double scale);

class MappingError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

struct MappingEntry {
  std::string leader_limb;
  std::string follower_limb;
  double scale = 1.0;
};

/// Leader limb to follower limb assignment with a per-limb translation scale.
struct LimbMapping {
  std::vector<MappingEntry> entries;

  static LimbMapping identity(const std::vector<std::string>& names, double scale = 1.0);

  /// Positive scales, unique leader limbs, injective onto follower limbs.
  void validate() const;
  /// validate() plus every follower limb exists in the model.
  void validate_against(const RobotModel& follower) const;
  const MappingEntry* by_leader(std::string_view leader_limb) const;
};

struct GestureConfig {
  double close_threshold = 0.9;
  double hold_seconds = 0.5;
  /// Max per-joint distance from the leader base pose for the puppeteer end gesture.
  double base_tolerance = 0.15;
};

/// Reports true once a condition has held continuously for hold_seconds. After firing it
/// disarms until the condition is observed false again, so a held gesture fires once.
class HoldDetector {
 public:
  explicit HoldDetector(double hold_seconds = 0.5, bool armed = true) : hold_(hold_seconds), armed_(armed) {}
  bool update(double now, bool condition);
  void reset(bool armed);

 private:
  double hold_;
  bool armed_;
  std::optional<double> since_;
};

struct GripperCalibration {
  double raw_min = 0.0;
  double raw_max = 1.0;
  /// Maps a raw reading to [0, 1].
  double normalize(double raw) const;
};

/// What a leader produces for one follower limb.
struct LeaderLimbInfo {
  std::string follower_limb;
  PayloadKind kind = PayloadKind::kEefDelta;
  /// Joint count of JointPositions payloads, 0 otherwise.
  std::size_t dof = 0;
};

/// Leader-side joint state used by the feedback module.
struct LeaderLimbState {
  std::string follower_limb;
  PayloadKind kind = PayloadKind::kEefDelta;
  JointVector q;       // empty for leaders without joints
  JointVector q_base;  // empty for leaders without joints
  double gripper = 0.0;
  const LimbChain* chain = nullptr;
};

struct LeaderSnapshot {
  std::vector<LeaderLimbState> limbs;
  double timestamp = 0.0;
};

/// Thrown by poll() when the device is gone; carries the last command it produced.
class DeviceDisconnected : public Error {
 public:
  explicit DeviceDisconnected(LeaderCommand last) : Error("leader device disconnected"), last_(std::move(last)) {}
  const LeaderCommand& last_command() const { return last_; }

 private:
  LeaderCommand last_;
};

/// Source of LeaderCommands. Calls to the virtual interface come from the session loop;
/// devices feed themselves through thread-safe producer methods on the concrete types.
class Leader {
 public:
  virtual ~Leader() = default;

  virtual std::string_view kind() const = 0;
  virtual std::vector<LeaderLimbInfo> describe() const = 0;
  /// True once the start gesture is seen. The session-start pose T0 is captured at that moment.
  virtual bool start_signal_check(double now) = 0;
  /// Freshest command; re-stamps the previous one when the device produced nothing new.
  virtual LeaderCommand poll(double now) = 0;
  /// The follower has finished its approach and the loop is about to run.
  virtual void on_running(double /*now*/) {}
  /// The session ended (end gesture processed or reset).
  virtual void end_session(double /*now*/) {}
  /// No further sessions will start.
  virtual bool finished() const { return false; }
  virtual std::shared_ptr<const LeaderSnapshot> snapshot() const { return nullptr; }

  void apply_feedback(const FeedbackTorques& torques) { feedback_.publish(torques); }
  std::shared_ptr<const FeedbackTorques> last_feedback() const { return feedback_.get(); }
  std::uint64_t feedback_count() const { return feedback_.version(); }

 private:
  LatestValue<FeedbackTorques> feedback_;
};

// ---------------------------------------------------------------------------------------
// Virtual puppeteer: joint-space leader fed by a simulated joint-state stream.

struct PuppeteerLimb {
  std::string name;
  LimbChain chain;
  JointVector base;
  GripperCalibration gripper;
};

struct JointSample {
  std::vector<JointVector> q;         // per puppeteer limb
  std::vector<double> gripper_raw;    // per puppeteer limb
};

/// Sampled on every poll; returning nullopt means the script is over.
using JointScript = std::function<std::optional<JointSample>(double t)>;

enum class CommandSpace { kAuto, kJoint, kEef };

class VirtualPuppeteer final : public Leader {
 public:
  /// kAuto emits joint positions for limbs whose chain matches the follower's
  /// (same joint count, kinds and axes) and EEF deltas otherwise.
  VirtualPuppeteer(std::vector<PuppeteerLimb> limbs, LimbMapping mapping, const RobotModel& follower,
                   GestureConfig gesture = {}, CommandSpace space = CommandSpace::kAuto);

  void set_script(JointScript script);
  /// Producer side: latest sample wins.
  void push(JointSample sample);
  void disconnect() { disconnected_ = true; }

  std::string_view kind() const override { return "virtual_puppeteer"; }
  std::vector<LeaderLimbInfo> describe() const override;
  bool start_signal_check(double now) override;
  LeaderCommand poll(double now) override;
  void end_session(double now) override;
  bool finished() const override { return finished_; }
  std::shared_ptr<const LeaderSnapshot> snapshot() const override { return snapshot_.get(); }

  const std::vector<PuppeteerLimb>& limbs() const { return limbs_; }
  const std::vector<Pose>& initial_poses() const { return t0_; }

 private:
  std::optional<JointSample> sample(double now);
  LeaderCommand make_command(const JointSample& s, double now);
  void publish_snapshot(const JointSample& s, double now);
  bool grippers_closed(const JointSample& s) const;
  bool at_base(const JointSample& s) const;

  std::vector<PuppeteerLimb> limbs_;
  std::vector<MappingEntry> mapping_;  // aligned with limbs_
  std::vector<PayloadKind> kinds_;
  std::vector<Pose> t0_;
  GestureConfig gesture_;
  JointScript script_;
  LatestValue<JointSample> inbox_;
  std::uint64_t consumed_version_ = 0;
  std::optional<LeaderCommand> last_;
  HoldDetector start_;
  HoldDetector end_;
  bool active_ = false;
  bool finished_ = false;
  std::atomic<bool> disconnected_{false};
  LatestValue<LeaderSnapshot> snapshot_;
};

/// Scripted operator for the virtual puppeteer: each cycle releases the grippers, closes
/// them at the base pose to start, moves each joint sinusoidally, returns to base and
/// closes the grippers again to end.
struct PuppeteerProfile {
  int cycles = 1;
  double idle = 0.3;
  double start_hold = 0.6;
  double settle = 0.3;
  double motion_duration = 4.0;
  double period = 4.0;
  std::vector<double> amplitude;  // per joint (rad); a single value applies to all joints
  double end_hold = 0.6;
  double gripper_motion = 0.5;  // peak normalized gripper closure while moving

  double cycle_length() const { return idle + start_hold + settle + motion_duration + end_hold; }
};

JointScript make_puppeteer_script(const std::vector<PuppeteerLimb>& limbs, const PuppeteerProfile& profile);

// ---------------------------------------------------------------------------------------
// Console leader: pose-space device driven by network input, initial pose = identity.

struct ConsoleInput {
  enum class Event { kDrag, kStart, kEnd };
  Event event = Event::kDrag;
  std::string limb;
  Eigen::Vector3d delta_translation = Eigen::Vector3d::Zero();
  Eigen::Quaterniond delta_rotation = Eigen::Quaterniond::Identity();
  std::optional<double> gripper;
};

class ConsoleLeader final : public Leader {
 public:
  explicit ConsoleLeader(LimbMapping mapping);

  /// Thread-safe. Throws MappingError for a limb outside the mapping.
  void push(const ConsoleInput& input);
  std::vector<std::string> input_limbs() const;

  std::string_view kind() const override { return "console"; }
  std::vector<LeaderLimbInfo> describe() const override;
  bool start_signal_check(double now) override;
  LeaderCommand poll(double now) override;
  void end_session(double now) override;
  std::shared_ptr<const LeaderSnapshot> snapshot() const override { return snapshot_.get(); }

 private:
  LimbMapping mapping_;
  mutable std::mutex mutex_;
  std::vector<Pose> pose_;
  std::vector<double> gripper_;
  bool start_pending_ = false;
  bool end_pending_ = false;
  LatestValue<LeaderSnapshot> snapshot_;
};

// ---------------------------------------------------------------------------------------
// Offline trajectory: replays a recording by timestamp.

struct RecordedLimb {
  std::string name;
  std::vector<std::string> joints;
  PayloadKind payload = PayloadKind::kJointPositions;
};

struct Trajectory {
  int schema_version = 1;
  std::vector<RecordedLimb> limbs;
  std::vector<double> timestamps;
  std::vector<LeaderCommand> commands;
};

class OfflineTrajectoryLeader final : public Leader {
 public:
  /// Entries map recorded limb names to follower limbs; identity by name when empty.
  OfflineTrajectoryLeader(Trajectory trajectory, LimbMapping mapping);

  std::string_view kind() const override { return "offline"; }
  std::vector<LeaderLimbInfo> describe() const override;
  bool start_signal_check(double now) override;
  LeaderCommand poll(double now) override;
  void on_running(double now) override;
  void end_session(double now) override;
  bool finished() const override { return done_; }

  const Trajectory& trajectory() const { return trajectory_; }

 private:
  LeaderCommand remap(const LeaderCommand& c) const;

  Trajectory trajectory_;
  LimbMapping mapping_;
  std::optional<double> epoch_;
  bool started_ = false;
  bool done_ = false;
};

/// Loads a JSONL recording (see docs/formats.md). Throws on unknown schema versions,
/// empty files, non-monotonic timestamps and mapping errors.
std::unique_ptr<OfflineTrajectoryLeader> load_offline_trajectory(const std::filesystem::path& path,
                                                                 const LimbMapping& mapping = {});

// ---------------------------------------------------------------------------------------
// Scripted leader: fixed command lists, one per session.

class ScriptedLeader final : public Leader {
 public:
  struct Session {
    int wait_checks = 0;  // start checks answered false before starting
    std::vector<LeaderCommand> commands;
  };

  ScriptedLeader(std::vector<LeaderLimbInfo> info, std::vector<Session> sessions);

  std::string_view kind() const override { return "scripted"; }
  std::vector<LeaderLimbInfo> describe() const override { return info_; }
  bool start_signal_check(double now) override;
  LeaderCommand poll(double now) override;
  /// Running restarts the command list, so the approach and the loop see the same first command.
  void on_running(double now) override;
  void end_session(double now) override;
  bool finished() const override;

 private:
  std::vector<LeaderLimbInfo> info_;
  std::deque<Session> sessions_;
  std::size_t cursor_ = 0;
  bool active_ = false;
  std::optional<LeaderCommand> last_;
};

}  // namespace teleop
