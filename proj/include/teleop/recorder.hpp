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

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "teleop/leader.hpp"
#include "teleop/types.hpp"

namespace teleop {

inline constexpr int kRecordingSchemaVersion = 1;

/// Record keys, in the order they are written.
const std::vector<std::string>& recordable_fields();

struct RecorderConfig {
  std::filesystem::path path;
  /// Keys to write; empty means all of recordable_fields().
  std::vector<std::string> fields;
  std::size_t flush_every = 50;
};

struct StepRecord {
  double timestamp = 0.0;  // session clock
  LeaderCommand command;
  ControlSignal signal;
  FollowerState state;
  std::shared_ptr<const FeedbackTorques> feedback;
};

/// JSONL step recorder. Each Running interval goes to its own file: the configured path,
/// then stem.1.ext, stem.2.ext, ... IO failures disable recording and leave a warning;
/// they never throw out of record().
class Recorder {
 public:
  Recorder(RecorderConfig config, std::vector<RecordedLimb> limbs);
  ~Recorder();

  Recorder(const Recorder&) = delete;
  Recorder& operator=(const Recorder&) = delete;

  /// Opens the next file and writes its header. t0 becomes timestamp zero.
  void begin_interval(double t0);
  void record(const StepRecord& rec);
  void end_interval();
  void flush();

  bool enabled() const { return enabled_; }
  bool in_interval() const { return out_.is_open(); }
  const std::vector<std::string>& warnings() const { return warnings_; }
  const std::vector<std::filesystem::path>& files() const { return files_; }
  std::size_t records_written() const { return total_; }

 private:
  std::filesystem::path interval_path(std::size_t n) const;
  void fail(const std::string& what);

  RecorderConfig config_;
  std::vector<RecordedLimb> limbs_;
  std::vector<bool> keep_;
  std::ofstream out_;
  double t0_ = 0.0;
  double last_ts_ = -1.0;
  std::size_t pending_ = 0;
  std::size_t total_ = 0;
  bool enabled_ = true;
  std::vector<std::string> warnings_;
  std::vector<std::filesystem::path> files_;
};

/// Parses a recording. Throws on an empty file, an unknown schema version, a malformed line
/// (reporting its line number) or non-monotonic timestamps (reporting the record index).
Trajectory read_recording(std::istream& in);
Trajectory read_recording(const std::filesystem::path& path);

}  // namespace teleop
