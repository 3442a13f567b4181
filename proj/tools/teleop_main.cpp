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

#include <atomic>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "teleop/bench.hpp"
#include "teleop/config.hpp"
#include "teleop/service.hpp"
#include "teleop/session.hpp"

#ifndef TELEOP_CONFIG_DIR
#define TELEOP_CONFIG_DIR "configs"
#endif

namespace fs = std::filesystem;
using namespace teleop;

namespace {

CancellationToken g_cancel;

void on_signal(int) { g_cancel.request(); }

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::unique_ptr<Session> build_session(FollowerSetup& follower, LeaderSetup leader, Clock& clock,
                                       std::optional<fs::path> record, bool feedback_thread) {
  SessionOptions opts;
  opts.rate = follower.rate;
  opts.approach_duration = follower.approach_duration;
  opts.reset_duration = follower.reset_duration;
  opts.feedback_thread = feedback_thread;
  if (record) opts.record = RecorderConfig{*record, {}, 50};
  TeleopPipeline pipeline(follower.model, follower.ik, follower.safety);
  return std::make_unique<Session>(follower.model, follower.model->base_pose, std::move(pipeline), follower.actuator,
                                   std::move(leader.leader), leader.feedback, clock, opts);
}

void report(const Session& s) {
  for (const auto& e : s.events()) {
    std::cout << "[" << e.time << "] " << to_string(e.from) << " -> " << to_string(e.to) << " (" << e.reason << ")\n";
  }
  print_warnings(s.warnings());
  if (const auto* rec = s.recorder()) {
    for (const auto& f : rec->files()) std::cout << "recorded " << f.string() << "\n";
    std::cout << rec->records_written() << " records\n";
  }
}

int cmd_run(const fs::path& leader_cfg, const fs::path& follower_cfg, const fs::path& env_cfg,
            std::optional<fs::path> record, std::optional<double> rate, std::optional<double> max_seconds) {
  FollowerSetup follower = load_follower_config(follower_cfg, rate);
  print_warnings(follower.warnings);
  const EnvConfig env = load_env_config(env_cfg);
  LeaderSetup leader = load_leader_config(leader_cfg, *follower.model, follower.rate);
  print_warnings(leader.warnings);

  std::unique_ptr<Clock> clock;
  if (env.realtime) {
    clock = std::make_unique<SteadyClock>();
  } else {
    clock = std::make_unique<ManualClock>();
  }
  auto session = build_session(follower, std::move(leader), *clock, record, true);

  std::unique_ptr<Service> service;
  if (env.service.enabled) {
    service = std::make_unique<Service>(*session, env.service);
    service->start();
    std::cout << "serving ws://" << env.service.bind << ":" << service->port() << "/ws\n";
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::optional<std::uint64_t> max_ticks;
  if (max_seconds) max_ticks = static_cast<std::uint64_t>(*max_seconds * follower.rate);
  session->run(g_cancel, max_ticks);
  if (session->state() != SessionState::kShutdown) session->shutdown("time limit");
  if (service) service->stop();
  report(*session);
  return 0;
}

int cmd_replay(const fs::path& file, const fs::path& follower_cfg, std::optional<fs::path> record,
               std::optional<double> rate, bool realtime) {
  FollowerSetup follower = load_follower_config(follower_cfg, rate);
  print_warnings(follower.warnings);
  LeaderSetup leader;
  leader.leader = load_offline_trajectory(file);
  leader.feedback.stale_after = 5.0 / follower.rate;
  std::unique_ptr<Clock> clock;
  if (realtime) {
    clock = std::make_unique<SteadyClock>();
  } else {
    clock = std::make_unique<ManualClock>();
  }
  auto session = build_session(follower, std::move(leader), *clock, record, realtime);
  std::signal(SIGINT, on_signal);
  session->run(g_cancel);
  report(*session);
  return 0;
}

int cmd_validate(const fs::path& urdf, const fs::path& limbs_cfg) {
  const auto selections = load_limb_selections(limbs_cfg);
  const ParsedRobot parsed = parse_robot_description(read_text_file(urdf), selections);
  std::cout << "robot " << parsed.model.name << ": " << parsed.model.limbs.size() << " limb(s)\n";
  for (std::size_t l = 0; l < parsed.model.limbs.size(); ++l) {
    const auto& chain = parsed.model.limbs[l];
    std::cout << "  " << chain.name << " (" << chain.base_link << " -> " << chain.tip_link << "), " << chain.dof()
              << " joints, " << chain.collision_spheres.size() << " spheres";
    if (chain.gripper_joint) std::cout << ", gripper " << chain.gripper_joint->name;
    std::cout << "\n";
    for (const auto& j : chain.joints) {
      std::cout << "    " << j.name << " [" << j.lower << ", " << j.upper << "] v<=" << j.velocity_limit << "\n";
    }
    const Pose eef = forward_kinematics(chain, parsed.model.base_pose[l]);
    std::cout << "    base pose EEF at (" << eef.translation().transpose() << ")\n";
  }
  print_warnings(parsed.warnings);
  return 0;
}

int cmd_bench(int limbs, const std::string& mode, int steps, std::optional<fs::path> follower_cfg) {
  const char* fixture = limbs == 4 ? "follower_quad.yaml" : limbs == 2 ? "follower_dual.yaml" : "follower_arm7.yaml";
  const fs::path cfg = follower_cfg.value_or(fs::path(TELEOP_CONFIG_DIR) / fixture);
  const FollowerSetup setup = load_follower_config(cfg);
  StepBenchOptions opts;
  opts.mode = mode == "eef" ? PayloadKind::kEefDelta : PayloadKind::kJointPositions;
  opts.steps = steps;
  const StepBenchResult r = bench_control_step(setup, opts);
  std::cout << "limbs=" << r.limbs << " mode=" << mode << " steps=" << r.steps << " mean_ms=" << r.mean_ms
            << " median_ms=" << r.median_ms << " p99_ms=" << r.p99_ms << " max_ms=" << r.max_ms
            << " ik_failures=" << r.ik_failures << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-limb teleoperation engine"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a teleoperation session");
  fs::path leader_cfg, follower_cfg, env_cfg;
  std::optional<fs::path> record;
  std::optional<double> rate, max_seconds;
  run->add_option("--leader", leader_cfg, "Leader config")->required()->check(CLI::ExistingFile);
  run->add_option("--follower", follower_cfg, "Follower config")->required()->check(CLI::ExistingFile);
  run->add_option("--env", env_cfg, "Environment config")->required()->check(CLI::ExistingFile);
  run->add_option("--record", record, "Record steps to this JSONL file");
  run->add_option("--rate", rate, "Loop rate in Hz (default: follower config, 50)");
  run->add_option("--max-seconds", max_seconds, "Stop after this much session time");

  auto* replay = app.add_subcommand("replay", "Replay a recording onto a follower");
  fs::path replay_file, replay_follower;
  std::optional<fs::path> replay_record;
  std::optional<double> replay_rate;
  bool replay_realtime = false;
  replay->add_option("file", replay_file, "Recording (JSONL)")->required()->check(CLI::ExistingFile);
  replay->add_option("--follower", replay_follower, "Follower config")->required()->check(CLI::ExistingFile);
  replay->add_option("--record", replay_record, "Record the replay");
  replay->add_option("--rate", replay_rate, "Loop rate in Hz");
  replay->add_flag("--realtime", replay_realtime, "Pace the replay with the wall clock");

  auto* validate = app.add_subcommand("validate-model", "Parse a URDF and extract the configured limbs");
  fs::path urdf, limbs_cfg;
  validate->add_option("urdf", urdf, "Robot description")->required()->check(CLI::ExistingFile);
  validate->add_option("--limbs", limbs_cfg, "Follower config with a limbs block")->required()->check(CLI::ExistingFile);

  auto* bench = app.add_subcommand("bench", "Time control steps");
  int bench_limbs = 1;
  std::string bench_mode = "joint";
  int bench_steps = 500;
  std::optional<fs::path> bench_follower;
  bench->add_option("--limbs", bench_limbs, "Limb count")->check(CLI::IsMember({1, 2, 4}));
  bench->add_option("--mode", bench_mode, "Command space")->check(CLI::IsMember({"joint", "eef"}));
  bench->add_option("--steps", bench_steps, "Timed steps")->check(CLI::PositiveNumber);
  bench->add_option("--follower", bench_follower, "Follower config overriding the built-in fixture");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(leader_cfg, follower_cfg, env_cfg, record, rate, max_seconds);
    if (*replay) return cmd_replay(replay_file, replay_follower, replay_record, replay_rate, replay_realtime);
    if (*validate) return cmd_validate(urdf, limbs_cfg);
    if (*bench) return cmd_bench(bench_limbs, bench_mode, bench_steps, bench_follower);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
