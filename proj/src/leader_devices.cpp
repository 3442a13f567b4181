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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "teleop/leader.hpp"

namespace teleop {

namespace {

bool same_kinematics(const LimbChain& a, const LimbChain& b) {
  if (a.joints.size() != b.joints.size()) return false;
  for (std::size_t i = 0; i < a.joints.size(); ++i) {
    if (a.joints[i].kind != b.joints[i].kind) return false;
    if ((a.joints[i].axis - b.joints[i].axis).cwiseAbs().maxCoeff() > 1e-9) return false;
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------------------

VirtualPuppeteer::VirtualPuppeteer(std::vector<PuppeteerLimb> limbs, LimbMapping mapping, const RobotModel& follower,
                                   GestureConfig gesture, CommandSpace space)
    : limbs_(std::move(limbs)),
      gesture_(gesture),
      start_(gesture.hold_seconds, true),
      end_(gesture.hold_seconds, false) {
  mapping.validate_against(follower);
  if (limbs_.empty()) throw ConfigError("virtual puppeteer: no limbs");
  for (const auto& limb : limbs_) {
    const MappingEntry* entry = mapping.by_leader(limb.name);
    if (!entry) throw MappingError("limb mapping: leader limb '" + limb.name + "' is not mapped");
    if (limb.base.size() != static_cast<Eigen::Index>(limb.chain.dof())) {
      throw DimensionError("virtual puppeteer: base pose of '" + limb.name + "' has wrong length");
    }
    const LimbChain& target = follower.limb(entry->follower_limb);
    const bool match = same_kinematics(limb.chain, target);
    PayloadKind kind = PayloadKind::kEefDelta;
    if (space == CommandSpace::kJoint) {
      if (!match) {
        throw ConfigError("virtual puppeteer: joint command space needs matching chains, '" + limb.name +
                          "' differs from follower limb '" + entry->follower_limb + "'");
      }
      kind = PayloadKind::kJointPositions;
    } else if (space == CommandSpace::kAuto && match) {
      kind = PayloadKind::kJointPositions;
    }
    mapping_.push_back(*entry);
    kinds_.push_back(kind);
    t0_.push_back(forward_kinematics(limb.chain, limb.base));
  }
}

void VirtualPuppeteer::set_script(JointScript script) { script_ = std::move(script); }

void VirtualPuppeteer::push(JointSample sample) {
  if (sample.q.size() != limbs_.size() || sample.gripper_raw.size() != limbs_.size()) {
    throw DimensionError("virtual puppeteer: sample must cover every limb");
  }
  inbox_.publish(std::move(sample));
}

std::vector<LeaderLimbInfo> VirtualPuppeteer::describe() const {
  std::vector<LeaderLimbInfo> out;
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    out.push_back({mapping_[i].follower_limb, kinds_[i],
                   kinds_[i] == PayloadKind::kJointPositions ? limbs_[i].chain.dof() : 0});
  }
  return out;
}

std::optional<JointSample> VirtualPuppeteer::sample(double now) {
  if (script_) {
    auto s = script_(now);
    if (!s) finished_ = true;
    return s;
  }
  auto [value, version] = inbox_.get_versioned();
  consumed_version_ = version;
  if (!value) return std::nullopt;
  return *value;
}

bool VirtualPuppeteer::grippers_closed(const JointSample& s) const {
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    if (limbs_[i].gripper.normalize(s.gripper_raw[i]) <= gesture_.close_threshold) return false;
  }
  return true;
}

bool VirtualPuppeteer::at_base(const JointSample& s) const {
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    if ((s.q[i] - limbs_[i].base).cwiseAbs().maxCoeff() > gesture_.base_tolerance) return false;
  }
  return true;
}

void VirtualPuppeteer::publish_snapshot(const JointSample& s, double now) {
  LeaderSnapshot snap;
  snap.timestamp = now;
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    LeaderLimbState st;
    st.follower_limb = mapping_[i].follower_limb;
    st.kind = kinds_[i];
    st.q = s.q[i];
    st.q_base = limbs_[i].base;
    st.gripper = limbs_[i].gripper.normalize(s.gripper_raw[i]);
    st.chain = &limbs_[i].chain;
    snap.limbs.push_back(std::move(st));
  }
  snapshot_.publish(std::move(snap));
}

LeaderCommand VirtualPuppeteer::make_command(const JointSample& s, double now) {
  LeaderCommand cmd;
  cmd.timestamp = now;
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    LimbCommand lc;
    lc.limb = mapping_[i].follower_limb;
    lc.gripper = limbs_[i].gripper.normalize(s.gripper_raw[i]);
    if (kinds_[i] == PayloadKind::kJointPositions) {
      lc.payload = JointPositions{s.q[i]};
    } else {
      lc.payload = EefDelta{compute_delta(t0_[i], forward_kinematics(limbs_[i].chain, s.q[i]), mapping_[i].scale)};
    }
    cmd.limbs.push_back(std::move(lc));
  }
  return cmd;
}

bool VirtualPuppeteer::start_signal_check(double now) {
  if (disconnected_) return false;
  auto s = sample(now);
  if (!s) return false;
  publish_snapshot(*s, now);
  if (!start_.update(now, grippers_closed(*s))) return false;
  for (std::size_t i = 0; i < limbs_.size(); ++i) t0_[i] = forward_kinematics(limbs_[i].chain, s->q[i]);
  active_ = true;
  end_.reset(false);
  last_ = make_command(*s, now);
  last_->start_requested = true;
  return true;
}

LeaderCommand VirtualPuppeteer::poll(double now) {
  if (disconnected_) throw DeviceDisconnected(last_.value_or(LeaderCommand{}));
  auto s = sample(now);
  if (!s) {
    LeaderCommand held = last_.value_or(LeaderCommand{});
    held.timestamp = now;
    held.start_requested = false;
    if (finished_ && active_) held.end_requested = true;
    last_ = held;
    return held;
  }
  publish_snapshot(*s, now);
  LeaderCommand cmd = make_command(*s, now);
  if (active_) cmd.end_requested = end_.update(now, grippers_closed(*s) && at_base(*s));
  last_ = cmd;
  return cmd;
}

void VirtualPuppeteer::end_session(double /*now*/) {
  active_ = false;
  start_.reset(false);
  end_.reset(false);
}

JointScript make_puppeteer_script(const std::vector<PuppeteerLimb>& limbs, const PuppeteerProfile& profile) {
  return [limbs, profile](double t) -> std::optional<JointSample> {
    const double cycle = profile.cycle_length();
    if (t < 0.0 || t >= cycle * profile.cycles) return std::nullopt;
    const double tc = std::fmod(t, cycle);
    const double motion_start = profile.idle + profile.start_hold + profile.settle;
    const double motion_end = motion_start + profile.motion_duration;

    double closure = 0.0;
    double envelope = 0.0;
    double u = 0.0;
    if (tc < profile.idle) {
      closure = 0.0;
    } else if (tc < profile.idle + profile.start_hold) {
      closure = 1.0;
    } else if (tc < motion_start) {
      closure = 0.0;
    } else if (tc < motion_end) {
      u = tc - motion_start;
      envelope = std::sin(std::numbers::pi * u / profile.motion_duration);
      closure = profile.gripper_motion * envelope;
    } else {
      closure = 1.0;
    }

    JointSample s;
    for (const auto& limb : limbs) {
      JointVector q = limb.base;
      for (Eigen::Index j = 0; j < q.size(); ++j) {
        double a = 0.0;
        if (profile.amplitude.size() == 1) {
          a = profile.amplitude[0];
        } else if (static_cast<std::size_t>(j) < profile.amplitude.size()) {
          a = profile.amplitude[static_cast<std::size_t>(j)];
        }
        q[j] += a * envelope * envelope * std::sin(2.0 * std::numbers::pi * u / profile.period + 0.7 * j);
      }
      q = limb.chain.clamp(q);
      s.q.push_back(q);
      s.gripper_raw.push_back(limb.gripper.raw_min + closure * (limb.gripper.raw_max - limb.gripper.raw_min));
    }
    return s;
  };
}

// ---------------------------------------------------------------------------------------

ConsoleLeader::ConsoleLeader(LimbMapping mapping) : mapping_(std::move(mapping)) {
  mapping_.validate();
  pose_.assign(mapping_.entries.size(), Pose::identity());
  gripper_.assign(mapping_.entries.size(), 0.0);
}

std::vector<std::string> ConsoleLeader::input_limbs() const {
  std::vector<std::string> out;
  for (const auto& e : mapping_.entries) out.push_back(e.leader_limb);
  return out;
}

void ConsoleLeader::push(const ConsoleInput& input) {
  std::lock_guard lock(mutex_);
  if (input.event == ConsoleInput::Event::kStart) {
    start_pending_ = true;
    return;
  }
  if (input.event == ConsoleInput::Event::kEnd) {
    end_pending_ = true;
    return;
  }
  std::size_t i = 0;
  for (; i < mapping_.entries.size(); ++i) {
    if (mapping_.entries[i].leader_limb == input.limb) break;
  }
  if (i == mapping_.entries.size()) throw MappingError("console input for unmapped limb '" + input.limb + "'");
  if (!input.delta_translation.allFinite() || !input.delta_rotation.coeffs().allFinite() ||
      input.delta_rotation.norm() < 1e-9) {
    throw Error("console input: non-finite or degenerate delta");
  }
  const Pose step = Pose::from_quaternion(input.delta_rotation.normalized(), input.delta_translation);
  pose_[i] = Pose(step.rotation() * pose_[i].rotation(), pose_[i].translation() + step.translation());
  if (input.gripper) gripper_[i] = std::clamp(*input.gripper, 0.0, 1.0);
}

std::vector<LeaderLimbInfo> ConsoleLeader::describe() const {
  std::vector<LeaderLimbInfo> out;
  for (const auto& e : mapping_.entries) out.push_back({e.follower_limb, PayloadKind::kEefDelta, 0});
  return out;
}

bool ConsoleLeader::start_signal_check(double /*now*/) {
  std::lock_guard lock(mutex_);
  if (!start_pending_) return false;
  start_pending_ = false;
  end_pending_ = false;
  std::fill(pose_.begin(), pose_.end(), Pose::identity());
  return true;
}

LeaderCommand ConsoleLeader::poll(double now) {
  LeaderCommand cmd;
  cmd.timestamp = now;
  LeaderSnapshot snap;
  snap.timestamp = now;
  std::lock_guard lock(mutex_);
  for (std::size_t i = 0; i < mapping_.entries.size(); ++i) {
    const auto& e = mapping_.entries[i];
    LimbCommand lc;
    lc.limb = e.follower_limb;
    lc.gripper = gripper_[i];
    lc.payload = EefDelta{compute_delta(Pose::identity(), pose_[i], e.scale)};
    cmd.limbs.push_back(std::move(lc));
    LeaderLimbState st;
    st.follower_limb = e.follower_limb;
    st.gripper = gripper_[i];
    snap.limbs.push_back(std::move(st));
  }
  cmd.end_requested = end_pending_;
  end_pending_ = false;
  snapshot_.publish(std::move(snap));
  return cmd;
}

void ConsoleLeader::end_session(double /*now*/) {
  std::lock_guard lock(mutex_);
  std::fill(pose_.begin(), pose_.end(), Pose::identity());
  end_pending_ = false;
}

// ---------------------------------------------------------------------------------------

OfflineTrajectoryLeader::OfflineTrajectoryLeader(Trajectory trajectory, LimbMapping mapping)
    : trajectory_(std::move(trajectory)), mapping_(std::move(mapping)) {
  if (trajectory_.commands.empty()) throw Error("offline trajectory: no samples");
  if (mapping_.entries.empty()) {
    std::vector<std::string> names;
    for (const auto& l : trajectory_.limbs) names.push_back(l.name);
    mapping_ = LimbMapping::identity(names);
  }
  mapping_.validate();
  for (const auto& l : trajectory_.limbs) {
    if (!mapping_.by_leader(l.name)) {
      throw MappingError("limb mapping: recorded limb '" + l.name + "' is not mapped");
    }
  }
  for (const auto& e : mapping_.entries) {
    const bool recorded = std::any_of(trajectory_.limbs.begin(), trajectory_.limbs.end(),
                                      [&](const RecordedLimb& l) { return l.name == e.leader_limb; });
    if (!recorded) throw MappingError("limb mapping: recording has no limb '" + e.leader_limb + "'");
  }
}

std::vector<LeaderLimbInfo> OfflineTrajectoryLeader::describe() const {
  std::vector<LeaderLimbInfo> out;
  for (const auto& l : trajectory_.limbs) {
    out.push_back({mapping_.by_leader(l.name)->follower_limb, l.payload,
                   l.payload == PayloadKind::kJointPositions ? l.joints.size() : 0});
  }
  return out;
}

bool OfflineTrajectoryLeader::start_signal_check(double /*now*/) {
  if (done_) return false;
  started_ = true;
  return true;
}

void OfflineTrajectoryLeader::on_running(double now) { epoch_ = now; }

LeaderCommand OfflineTrajectoryLeader::remap(const LeaderCommand& c) const {
  LeaderCommand out = c;
  for (auto& l : out.limbs) {
    if (const MappingEntry* e = mapping_.by_leader(l.limb)) {
      l.limb = e->follower_limb;
      if (auto* d = std::get_if<EefDelta>(&l.payload); d && e->scale != 1.0) {
        d->delta = Pose(d->delta.rotation(), e->scale * d->delta.translation());
      }
    }
  }
  return out;
}

LeaderCommand OfflineTrajectoryLeader::poll(double now) {
  std::size_t index = 0;
  const std::size_t last = trajectory_.commands.size() - 1;
  if (epoch_) {
    // Recorded timestamps carry microsecond rounding.
    const double t = now - *epoch_ + trajectory_.timestamps.front() + 1e-6;
    auto it = std::upper_bound(trajectory_.timestamps.begin(), trajectory_.timestamps.end(), t);
    index = it == trajectory_.timestamps.begin() ? 0 : static_cast<std::size_t>(it - trajectory_.timestamps.begin()) - 1;
  }
  LeaderCommand cmd = remap(trajectory_.commands[index]);
  cmd.timestamp = now;
  cmd.start_requested = false;
  cmd.end_requested = epoch_.has_value() && index == last;
  if (cmd.end_requested) done_ = true;
  return cmd;
}

void OfflineTrajectoryLeader::end_session(double /*now*/) {
  epoch_.reset();
  started_ = false;
  done_ = true;
}

// ---------------------------------------------------------------------------------------

ScriptedLeader::ScriptedLeader(std::vector<LeaderLimbInfo> info, std::vector<Session> sessions)
    : info_(std::move(info)), sessions_(sessions.begin(), sessions.end()) {
  for (const auto& s : sessions_) {
    if (s.commands.empty()) throw Error("scripted leader: empty session");
  }
}

bool ScriptedLeader::start_signal_check(double /*now*/) {
  if (active_) return true;
  if (sessions_.empty()) return false;
  if (sessions_.front().wait_checks > 0) {
    --sessions_.front().wait_checks;
    return false;
  }
  active_ = true;
  cursor_ = 0;
  return true;
}

void ScriptedLeader::on_running(double /*now*/) { cursor_ = 0; }

LeaderCommand ScriptedLeader::poll(double now) {
  if (!active_) {
    LeaderCommand held = last_.value_or(LeaderCommand{});
    held.timestamp = now;
    held.start_requested = held.end_requested = false;
    return held;
  }
  const auto& cmds = sessions_.front().commands;
  LeaderCommand cmd = cmds[std::min(cursor_, cmds.size() - 1)];
  ++cursor_;
  cmd.timestamp = now;
  cmd.end_requested = cmd.end_requested || cursor_ >= cmds.size();
  last_ = cmd;
  return cmd;
}

void ScriptedLeader::end_session(double /*now*/) {
  if (!active_) return;
  sessions_.pop_front();
  active_ = false;
}

bool ScriptedLeader::finished() const { return sessions_.empty() && !active_; }

}  // namespace teleop
