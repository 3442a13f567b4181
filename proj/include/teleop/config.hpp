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

// Loading of the three session config files (follower, leader, env). Formats are described
// in docs/config.md. Relative paths inside a file resolve against that file's directory.

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "teleop/feedback.hpp"
#include "teleop/follower_sim.hpp"
#include "teleop/ik_solver.hpp"
#include "teleop/leader.hpp"
#include "teleop/pipeline.hpp"
#include "teleop/robot_model.hpp"

namespace teleop {

struct FollowerSetup {
  std::shared_ptr<const RobotModel> model;
  std::vector<std::string> warnings;
  std::vector<IKConfig> ik;
  SafetyConfig safety;
  ActuatorConfig actuator;
  double rate = 50.0;
  double approach_duration = 1.0;
  double reset_duration = 1.0;
};

/// rate_override replaces the file's loop rate (and therefore the safety dt).
FollowerSetup load_follower_config(const std::filesystem::path& path, std::optional<double> rate_override = {});
FollowerSetup parse_follower_config(const std::string& yaml_text, const std::filesystem::path& base_dir,
                                    std::optional<double> rate_override = {});

struct LeaderSetup {
  std::unique_ptr<Leader> leader;
  FeedbackConfig feedback;
  std::vector<std::string> warnings;
};

/// Builds the configured leader device for a follower model. loop_rate sets the default
/// feedback staleness threshold (5 loop periods).
LeaderSetup load_leader_config(const std::filesystem::path& path, const RobotModel& follower, double loop_rate);
LeaderSetup parse_leader_config(const std::string& yaml_text, const std::filesystem::path& base_dir,
                                const RobotModel& follower, double loop_rate);

/// Puppeteer limbs read from a leader URDF plus the limb blocks of a leader config.
std::vector<PuppeteerLimb> load_puppeteer_limbs(const std::string& yaml_text, const std::filesystem::path& base_dir);

struct ServiceConfig {
  bool enabled = false;
  std::string bind = "127.0.0.1";
  unsigned short port = 8700;
  double state_rate = 30.0;
  double feedback_rate_cap = 60.0;
  std::optional<std::filesystem::path> static_dir;
};

struct EnvConfig {
  std::string env = "sim";
  bool realtime = true;
  ServiceConfig service;
};

EnvConfig load_env_config(const std::filesystem::path& path);
EnvConfig parse_env_config(const std::string& yaml_text, const std::filesystem::path& base_dir);

/// Limb selections and IK blocks of a follower config without building the model, for
/// validate-model.
std::vector<LimbSelection> load_limb_selections(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace teleop
