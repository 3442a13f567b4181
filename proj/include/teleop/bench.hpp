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

#include "teleop/config.hpp"
#include "teleop/types.hpp"

namespace teleop {

struct StepBenchOptions {
  PayloadKind mode = PayloadKind::kJointPositions;
  int steps = 500;
  int warmup = 20;
};

struct StepBenchResult {
  int limbs = 0;
  PayloadKind mode = PayloadKind::kJointPositions;
  int steps = 0;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double p99_ms = 0.0;
  double max_ms = 0.0;
  int ik_failures = 0;
};

/// Times full control steps (interpret, safety filter, follower step) on a follower setup
/// driven by a synthetic leader: sinusoidal joint motion in joint mode, a 5 cm circle with
/// a small wrist rotation in EEF mode.
StepBenchResult bench_control_step(const FollowerSetup& setup, const StepBenchOptions& options);

}  // namespace teleop
