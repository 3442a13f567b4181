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
#include <chrono>

namespace teleop {

/// Monotonic session clock in seconds.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now() const = 0;
  virtual void sleep_until(double t) = 0;
  virtual bool realtime() const = 0;
};

class SteadyClock final : public Clock {
 public:
  SteadyClock() : epoch_(std::chrono::steady_clock::now()) {}
  double now() const override;
  void sleep_until(double t) override;
  bool realtime() const override { return true; }

 private:
  std::chrono::steady_clock::time_point epoch_;
};

/// Simulated time: sleeping advances the clock instantly.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(double start = 0.0) : now_(start) {}
  double now() const override { return now_.load(); }
  void sleep_until(double t) override;
  bool realtime() const override { return false; }
  void advance(double dt) { sleep_until(now() + dt); }

 private:
  std::atomic<double> now_;
};

}  // namespace teleop
