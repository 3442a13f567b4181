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

#include "teleop/config.hpp"

#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace teleop {

namespace fs = std::filesystem;

namespace {

YAML::Node parse_yaml(const std::string& text, const std::string& what) {
  try {
    return YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(what + ": " + e.msg, e.mark.line + 1, e.mark.column + 1);
  }
}

template <typename T>
T get(const YAML::Node& node, const std::string& key, const T& fallback) {
  if (!node || !node.IsMap()) return fallback;
  const YAML::Node v = node[key];
  if (!v) return fallback;
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("config: bad value for '" + key + "'");
  }
}

template <typename T>
T require(const YAML::Node& node, const std::string& key, const std::string& where) {
  const YAML::Node v = node[key];
  if (!v) throw ConfigError(where + ": missing '" + key + "'");
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + ": bad value for '" + key + "'");
  }
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::Vector3d vec3(const YAML::Node& node, const std::string& where) {
  const auto v = node.as<std::vector<double>>();
  if (v.size() != 3) throw ConfigError(where + ": expected 3 numbers");
  return {v[0], v[1], v[2]};
}

fs::path resolve(const fs::path& base_dir, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

LimbSelection parse_selection(const YAML::Node& n) {
  LimbSelection s;
  s.name = require<std::string>(n, "name", "limb");
  s.base_link = require<std::string>(n, "base_link", "limb '" + s.name + "'");
  s.tip_link = require<std::string>(n, "tip_link", "limb '" + s.name + "'");
  if (n["gripper_joint"]) s.gripper_joint = n["gripper_joint"].as<std::string>();
  if (n["base_pose"]) s.base_pose = n["base_pose"].as<std::vector<double>>();
  for (const auto& sp : n["collision_spheres"]) {
    SphereSpec spec;
    spec.link = require<std::string>(sp, "link", "collision sphere");
    spec.center = sp["center"] ? vec3(sp["center"], "collision sphere center") : Eigen::Vector3d::Zero();
    spec.radius = require<double>(sp, "radius", "collision sphere");
    if (!(spec.radius > 0.0)) throw ConfigError("collision sphere on '" + spec.link + "': radius must be positive");
    s.spheres.push_back(spec);
  }
  return s;
}

IKConfig parse_ik(const YAML::Node& n) {
  IKConfig c;
  if (!n) return c;
  c.damping = get(n, "damping", c.damping);
  c.max_iterations = get(n, "max_iterations", c.max_iterations);
  c.position_tolerance = get(n, "position_tolerance", c.position_tolerance);
  c.orientation_tolerance = get(n, "orientation_tolerance", c.orientation_tolerance);
  c.step_scale = get(n, "step_scale", c.step_scale);
  c.max_halvings = get(n, "max_halvings", c.max_halvings);
  if (n["joint_weights"]) c.joint_weights = to_vector(n["joint_weights"].as<std::vector<double>>());
  return c;
}

std::vector<LimbSelection> selections(const YAML::Node& root) {
  if (!root["limbs"] || !root["limbs"].IsSequence() || root["limbs"].size() == 0) {
    throw ConfigError("config: 'limbs' must be a non-empty list");
  }
  std::vector<LimbSelection> out;
  for (const auto& n : root["limbs"]) out.push_back(parse_selection(n));
  return out;
}

}  // namespace

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FollowerSetup parse_follower_config(const std::string& yaml_text, const fs::path& base_dir,
                                    std::optional<double> rate_override) {
  const YAML::Node root = parse_yaml(yaml_text, "follower config");
  const auto urdf = resolve(base_dir, require<std::string>(root, "urdf", "follower config"));
  const auto sel = selections(root);
  ParsedRobot parsed = parse_robot_description(read_text_file(urdf), sel);

  FollowerSetup setup;
  setup.warnings = parsed.warnings;
  setup.rate = rate_override.value_or(get(root, "rate", 50.0));
  if (!(setup.rate > 0.0)) throw ConfigError("follower config: rate must be positive");
  setup.approach_duration = get(root, "approach_duration", setup.approach_duration);
  setup.reset_duration = get(root, "reset_duration", setup.reset_duration);

  for (const auto& n : root["limbs"]) setup.ik.push_back(parse_ik(n["ik"]));

  const YAML::Node safety = root["safety"];
  setup.safety = SafetyConfig::from_model(parsed.model, 1.0 / setup.rate, get(safety, "collision_margin", 0.0));
  setup.safety.parallel = get(safety, "parallel", false);
  const double vscale = get(safety, "velocity_scale", 1.0);
  if (!(vscale > 0.0)) throw ConfigError("follower config: safety.velocity_scale must be positive");
  for (auto& v : setup.safety.velocity_limits) v *= vscale;
  if (safety && safety["velocity_limits"]) {
    for (const auto& kv : safety["velocity_limits"]) {
      const auto name = kv.first.as<std::string>();
      const auto idx = parsed.model.limb_index(name);
      if (!idx) throw ConfigError("follower config: velocity limits for unknown limb '" + name + "'");
      setup.safety.velocity_limits[*idx] = to_vector(kv.second.as<std::vector<double>>());
    }
  }

  const YAML::Node act = root["actuator"];
  setup.actuator = ActuatorConfig::from_model(parsed.model, 1.0);
  const double factor = get(act, "velocity_factor", 2.0);
  for (std::size_t l = 0; l < setup.actuator.velocity_limits.size(); ++l) {
    setup.actuator.velocity_limits[l] = factor * setup.safety.velocity_limits[l];
  }
  setup.actuator.gripper_tau = get(act, "gripper_tau", setup.actuator.gripper_tau);

  setup.model = std::make_shared<const RobotModel>(std::move(parsed.model));
  setup.safety.validate(*setup.model);
  for (std::size_t l = 0; l < setup.ik.size(); ++l) setup.ik[l].validate(setup.model->limbs[l].dof());
  return setup;
}

FollowerSetup load_follower_config(const fs::path& path, std::optional<double> rate_override) {
  return parse_follower_config(read_text_file(path), path.parent_path(), rate_override);
}

std::vector<LimbSelection> load_limb_selections(const fs::path& path) {
  return selections(parse_yaml(read_text_file(path), "limb config"));
}

std::vector<PuppeteerLimb> load_puppeteer_limbs(const std::string& yaml_text, const fs::path& base_dir) {
  const YAML::Node root = parse_yaml(yaml_text, "leader config");
  const auto urdf = resolve(base_dir, require<std::string>(root, "urdf", "leader config"));
  const auto sel = selections(root);
  const ParsedRobot parsed = parse_robot_description(read_text_file(urdf), sel);
  std::vector<PuppeteerLimb> out;
  std::size_t i = 0;
  for (const auto& n : root["limbs"]) {
    PuppeteerLimb p;
    p.name = sel[i].name;
    p.chain = parsed.model.limbs[i];
    p.base = parsed.model.base_pose[i];
    if (const YAML::Node cal = n["gripper_calibration"]) {
      p.gripper.raw_min = get(cal, "min", 0.0);
      p.gripper.raw_max = get(cal, "max", 1.0);
    }
    out.push_back(std::move(p));
    ++i;
  }
  return out;
}

LeaderSetup parse_leader_config(const std::string& yaml_text, const fs::path& base_dir, const RobotModel& follower,
                                double loop_rate) {
  const YAML::Node root = parse_yaml(yaml_text, "leader config");
  LeaderSetup setup;

  const YAML::Node fb = root["feedback"];
  setup.feedback.kp = get(fb, "kp", setup.feedback.kp);
  setup.feedback.bias_gain = get(fb, "bias_gain", setup.feedback.bias_gain);
  setup.feedback.gripper_gain = get(fb, "gripper_gain", setup.feedback.gripper_gain);
  setup.feedback.torque_clip = get(fb, "torque_clip", setup.feedback.torque_clip);
  setup.feedback.rate = get(fb, "rate", setup.feedback.rate);
  setup.feedback.stale_after = get(fb, "stale_after", 5.0 / loop_rate);
  setup.feedback.validate();

  LimbMapping mapping;
  for (const auto& n : root["limbs"]) {
    MappingEntry e;
    e.leader_limb = require<std::string>(n, "name", "leader limb");
    e.follower_limb = get(n, "follower", e.leader_limb);
    e.scale = get(n, "scale", 1.0);
    mapping.entries.push_back(e);
  }

  const auto device = require<std::string>(root, "device", "leader config");
  if (device == "virtual_puppeteer") {
    GestureConfig gesture;
    if (const YAML::Node g = root["gesture"]) {
      gesture.close_threshold = get(g, "close_threshold", gesture.close_threshold);
      gesture.hold_seconds = get(g, "hold_seconds", gesture.hold_seconds);
      gesture.base_tolerance = get(g, "base_tolerance", gesture.base_tolerance);
    }
    const auto space_name = get<std::string>(root, "command_space", "auto");
    CommandSpace space = CommandSpace::kAuto;
    if (space_name == "joint") {
      space = CommandSpace::kJoint;
    } else if (space_name == "eef") {
      space = CommandSpace::kEef;
    } else if (space_name != "auto") {
      throw ConfigError("leader config: command_space must be auto, joint or eef");
    }
    auto limbs = load_puppeteer_limbs(yaml_text, base_dir);
    auto leader = std::make_unique<VirtualPuppeteer>(limbs, mapping, follower, gesture, space);
    if (const YAML::Node s = root["script"]) {
      PuppeteerProfile profile;
      profile.cycles = get(s, "cycles", profile.cycles);
      profile.idle = get(s, "idle", profile.idle);
      profile.start_hold = get(s, "start_hold", profile.start_hold);
      profile.settle = get(s, "settle", profile.settle);
      profile.motion_duration = get(s, "motion_duration", profile.motion_duration);
      profile.period = get(s, "period", profile.period);
      profile.amplitude = get(s, "amplitude", std::vector<double>{0.2});
      profile.end_hold = get(s, "end_hold", profile.end_hold);
      profile.gripper_motion = get(s, "gripper_motion", profile.gripper_motion);
      leader->set_script(make_puppeteer_script(leader->limbs(), profile));
    }
    setup.leader = std::move(leader);
  } else if (device == "console") {
    mapping.validate_against(follower);
    setup.leader = std::make_unique<ConsoleLeader>(mapping);
  } else if (device == "offline") {
    const auto file = resolve(base_dir, require<std::string>(root, "trajectory", "leader config"));
    setup.leader = load_offline_trajectory(file, mapping);
  } else {
    throw ConfigError("leader config: unknown device '" + device + "'");
  }
  return setup;
}

LeaderSetup load_leader_config(const fs::path& path, const RobotModel& follower, double loop_rate) {
  return parse_leader_config(read_text_file(path), path.parent_path(), follower, loop_rate);
}

EnvConfig parse_env_config(const std::string& yaml_text, const fs::path& base_dir) {
  const YAML::Node root = parse_yaml(yaml_text, "env config");
  EnvConfig env;
  env.env = get<std::string>(root, "env", env.env);
  if (env.env != "sim") throw ConfigError("env config: only 'sim' is available, got '" + env.env + "'");
  env.realtime = get(root, "realtime", env.realtime);
  if (const YAML::Node s = root["service"]) {
    env.service.enabled = get(s, "enabled", true);
    env.service.bind = get<std::string>(s, "bind", env.service.bind);
    env.service.port = static_cast<unsigned short>(get<int>(s, "port", env.service.port));
    env.service.state_rate = get(s, "state_rate", env.service.state_rate);
    env.service.feedback_rate_cap = get(s, "feedback_rate_cap", env.service.feedback_rate_cap);
    if (s["static_dir"]) env.service.static_dir = resolve(base_dir, s["static_dir"].as<std::string>());
  }
  return env;
}

EnvConfig load_env_config(const fs::path& path) { return parse_env_config(read_text_file(path), path.parent_path()); }

}  // namespace teleop
