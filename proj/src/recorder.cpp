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

#include "teleop/recorder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "teleop/json_codec.hpp"

namespace teleop {

using codec::json;

const std::vector<std::string>& recordable_fields() {
  static const std::vector<std::string> fields = {"timestamp", "command", "q_cmd",    "q_actual",
                                                   "gripper_cmd", "gripper_actual", "T_cmd", "T_actual",
                                                   "flags",     "feedback"};
  return fields;
}

Recorder::Recorder(RecorderConfig config, std::vector<RecordedLimb> limbs)
    : config_(std::move(config)), limbs_(std::move(limbs)) {
  const auto& all = recordable_fields();
  keep_.assign(all.size(), config_.fields.empty());
  for (const auto& f : config_.fields) {
    auto it = std::find(all.begin(), all.end(), f);
    if (it == all.end()) throw ConfigError("recorder: unknown field '" + f + "'");
    keep_[static_cast<std::size_t>(it - all.begin())] = true;
  }
  if (config_.flush_every == 0) config_.flush_every = 1;
}

Recorder::~Recorder() {
  if (out_.is_open()) end_interval();
}

std::filesystem::path Recorder::interval_path(std::size_t n) const {
  if (n == 0) return config_.path;
  auto p = config_.path;
  const auto ext = p.extension().string();
  p.replace_filename(p.stem().string() + "." + std::to_string(n) + ext);
  return p;
}

void Recorder::fail(const std::string& what) {
  enabled_ = false;
  warnings_.push_back("recording disabled: " + what);
  if (out_.is_open()) out_.close();
}

void Recorder::begin_interval(double t0) {
  if (!enabled_) return;
  if (out_.is_open()) end_interval();
  const auto path = interval_path(files_.size());
  out_.open(path, std::ios::out | std::ios::trunc);
  if (!out_) {
    fail("cannot open " + path.string());
    return;
  }
  files_.push_back(path);
  t0_ = t0;
  last_ts_ = -1.0;
  json limbs = json::array();
  for (const auto& l : limbs_) {
    limbs.push_back({{"name", l.name}, {"joints", l.joints}, {"payload", std::string(to_string(l.payload))}});
  }
  json fields = json::array();
  for (std::size_t i = 0; i < keep_.size(); ++i) {
    if (keep_[i]) fields.push_back(recordable_fields()[i]);
  }
  const json header = {{"schema_version", kRecordingSchemaVersion}, {"limbs", limbs}, {"fields", fields}};
  out_ << header.dump() << '\n';
  flush();
}

void Recorder::record(const StepRecord& rec) {
  if (!enabled_ || !out_.is_open()) return;
  double ts = std::round((rec.timestamp - t0_) * 1e6) / 1e6;
  if (ts <= last_ts_) ts = last_ts_ + 1e-6;
  last_ts_ = ts;

  const auto by_limb = [&](auto&& fn) {
    json o = json::object();
    for (std::size_t i = 0; i < limbs_.size(); ++i) o[limbs_[i].name] = fn(i);
    return o;
  };
  const auto& s = rec.signal;
  const auto& st = rec.state;
  json line = json::object();
  const auto& names = recordable_fields();
  for (std::size_t f = 0; f < names.size(); ++f) {
    if (!keep_[f]) continue;
    const std::string& key = names[f];
    if (key == "timestamp") {
      line[key] = ts;
    } else if (key == "command") {
      line[key] = codec::command_to_json(rec.command);
    } else if (key == "q_cmd" && s.q_cmd.size() == limbs_.size()) {
      line[key] = by_limb([&](std::size_t i) { return codec::vector_to_json(s.q_cmd[i]); });
    } else if (key == "q_actual" && st.q_actual.size() == limbs_.size()) {
      line[key] = by_limb([&](std::size_t i) { return codec::vector_to_json(st.q_actual[i]); });
    } else if (key == "gripper_cmd" && s.gripper_cmd.size() == limbs_.size()) {
      line[key] = by_limb([&](std::size_t i) { return json(s.gripper_cmd[i]); });
    } else if (key == "gripper_actual" && st.gripper_actual.size() == limbs_.size()) {
      line[key] = by_limb([&](std::size_t i) { return json(st.gripper_actual[i]); });
    } else if (key == "T_cmd" && s.T_cmd.size() == limbs_.size()) {
      line[key] = by_limb([&](std::size_t i) { return codec::pose_to_json(s.T_cmd[i]); });
    } else if (key == "T_actual" && st.T_actual.size() == limbs_.size()) {
      line[key] = by_limb([&](std::size_t i) { return codec::pose_to_json(st.T_actual[i]); });
    } else if (key == "flags" && s.flags.size() == limbs_.size()) {
      line[key] = by_limb([&](std::size_t i) { return codec::flags_to_json(s.flags[i]); });
    } else if (key == "feedback") {
      line[key] = rec.feedback ? codec::feedback_to_json(*rec.feedback) : json(nullptr);
    }
  }
  out_ << line.dump() << '\n';
  if (!out_) {
    fail("write to " + files_.back().string() + " failed");
    return;
  }
  ++total_;
  if (++pending_ >= config_.flush_every) flush();
}

void Recorder::flush() {
  if (!out_.is_open()) return;
  out_.flush();
  pending_ = 0;
  if (!out_) fail("flush of " + files_.back().string() + " failed");
}

void Recorder::end_interval() {
  if (!out_.is_open()) return;
  flush();
  if (out_.is_open()) out_.close();
}

Trajectory read_recording(std::istream& in) {
  Trajectory traj;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<PayloadKind> kinds;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("recording: malformed JSON: ") + e.what(), static_cast<int>(line_no), 1);
    }
    if (!have_header) {
      if (!j.contains("schema_version")) throw Error("recording: first line is not a header");
      traj.schema_version = j.at("schema_version").get<int>();
      if (traj.schema_version != kRecordingSchemaVersion) {
        throw Error("recording: unknown schema version " + std::to_string(traj.schema_version));
      }
      for (const auto& l : j.at("limbs")) {
        RecordedLimb rl;
        rl.name = l.at("name").get<std::string>();
        rl.joints = l.value("joints", std::vector<std::string>{});
        const auto payload = l.value("payload", std::string("joint_positions"));
        if (payload == "joint_positions") {
          rl.payload = PayloadKind::kJointPositions;
        } else if (payload == "eef_delta") {
          rl.payload = PayloadKind::kEefDelta;
        } else {
          throw Error("recording: unknown payload kind '" + payload + "'");
        }
        traj.limbs.push_back(std::move(rl));
      }
      have_header = true;
      continue;
    }
    const std::size_t index = traj.commands.size();
    try {
      const double ts = j.at("timestamp").get<double>();
      LeaderCommand cmd;
      if (j.contains("command")) {
        cmd = codec::command_from_json(j.at("command"));
      } else if (j.contains("q_cmd")) {
        for (const auto& l : traj.limbs) {
          LimbCommand lc;
          lc.limb = l.name;
          lc.payload = JointPositions{codec::vector_from_json(j.at("q_cmd").at(l.name))};
          if (j.contains("gripper_cmd")) lc.gripper = j.at("gripper_cmd").at(l.name).get<double>();
          cmd.limbs.push_back(std::move(lc));
        }
      } else {
        throw Error("record holds neither 'command' nor 'q_cmd'");
      }
      if (!traj.timestamps.empty() && !(ts > traj.timestamps.back())) {
        throw Error("recording: non-monotonic timestamp at record " + std::to_string(index));
      }
      cmd.timestamp = ts;
      traj.timestamps.push_back(ts);
      traj.commands.push_back(std::move(cmd));
    } catch (const json::exception& e) {
      throw ParseError(std::string("recording: ") + e.what(), static_cast<int>(line_no), 1);
    }
  }
  if (!have_header) throw Error("recording: empty file");
  if (traj.commands.empty()) throw Error("recording: no samples");
  return traj;
}

Trajectory read_recording(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("recording: cannot open " + path.string());
  return read_recording(in);
}

std::unique_ptr<OfflineTrajectoryLeader> load_offline_trajectory(const std::filesystem::path& path,
                                                                 const LimbMapping& mapping) {
  return std::make_unique<OfflineTrajectoryLeader>(read_recording(path), mapping);
}

}  // namespace teleop
