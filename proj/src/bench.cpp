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

#include "teleop/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>

namespace teleop {

namespace {

LeaderCommand synthetic_command(const RobotModel& model, PayloadKind mode, double t) {
  LeaderCommand cmd;
  cmd.timestamp = t;
  const double w = 2.0 * std::numbers::pi * 0.5;
  for (std::size_t l = 0; l < model.limbs.size(); ++l) {
    LimbCommand lc;
    lc.limb = model.limbs[l].name;
    lc.gripper = 0.5 + 0.5 * std::sin(w * t);
    if (mode == PayloadKind::kJointPositions) {
      JointVector q = model.base_pose[l];
      for (Eigen::Index j = 0; j < q.size(); ++j) q[j] += 0.3 * std::sin(w * t + 0.5 * static_cast<double>(j + l));
      lc.payload = JointPositions{model.limbs[l].clamp(q)};
    } else {
      const Eigen::Vector3d p(0.05 * std::sin(w * t), 0.05 * (1.0 - std::cos(w * t)), 0.02 * std::sin(2.0 * w * t));
      lc.payload = EefDelta{Pose::from_axis_angle(Eigen::Vector3d(0.3, 0.2, 1.0), 0.2 * std::sin(w * t), p)};
    }
    cmd.limbs.push_back(std::move(lc));
  }
  return cmd;
}

}  // namespace

StepBenchResult bench_control_step(const FollowerSetup& setup, const StepBenchOptions& options) {
  const RobotModel& model = *setup.model;
  TeleopPipeline pipeline(setup.model, setup.ik, setup.safety);
  FollowerSim follower(setup.model, setup.actuator, model.base_pose);
  pipeline.capture_initial(follower.state());
  std::vector<JointVector> prev = model.base_pose;
  const double dt = setup.safety.dt;

  StepBenchResult r;
  r.limbs = static_cast<int>(model.limbs.size());
  r.mode = options.mode;
  std::vector<double> ms;
  ms.reserve(static_cast<std::size_t>(options.steps));
  const int total = options.warmup + options.steps;
  for (int k = 0; k < total; ++k) {
    const LeaderCommand cmd = synthetic_command(model, options.mode, k * dt);
    const auto t0 = std::chrono::steady_clock::now();
    ControlSignal sig = pipeline.process(cmd, follower.state(), prev);
    follower.step(sig, dt);
    const auto t1 = std::chrono::steady_clock::now();
    prev = sig.q_cmd;
    if (k < options.warmup) continue;
    ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    for (const auto& f : sig.flags) r.ik_failures += f.ik_converged ? 0 : 1;
  }
  r.steps = options.steps;
  if (ms.empty()) return r;
  r.mean_ms = std::accumulate(ms.begin(), ms.end(), 0.0) / static_cast<double>(ms.size());
  std::sort(ms.begin(), ms.end());
  r.median_ms = ms[ms.size() / 2];
  r.p99_ms = ms[std::min(ms.size() - 1, static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(ms.size()))) - 1)];
  r.max_ms = ms.back();
  return r;
}

}  // namespace teleop
