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
#include <memory>
#include <mutex>
#include <utility>

namespace teleop {

/// Single-slot latest-value mailbox. Publishing replaces the slot; readers copy a shared
/// pointer under a short lock and never hold it while computing.
template <typename T>
class LatestValue {
 public:
  void publish(T value) {
    auto next = std::make_shared<const T>(std::move(value));
    std::lock_guard lock(mutex_);
    value_ = std::move(next);
    ++version_;
  }

  std::shared_ptr<const T> get() const {
    std::lock_guard lock(mutex_);
    return value_;
  }

  /// Snapshot together with the number of publications it reflects.
  std::pair<std::shared_ptr<const T>, std::uint64_t> get_versioned() const {
    std::lock_guard lock(mutex_);
    return {value_, version_};
  }

  std::uint64_t version() const {
    std::lock_guard lock(mutex_);
    return version_;
  }

  void clear() {
    std::lock_guard lock(mutex_);
    value_.reset();
  }

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const T> value_;
  std::uint64_t version_ = 0;
};

/// Cooperative shutdown flag shared by the session loop and its helpers.
class CancellationToken {
 public:
  void request() { flag_.store(true, std::memory_order_release); }
  bool requested() const { return flag_.load(std::memory_order_acquire); }

 private:
  std::atomic<bool> flag_{false};
};

}  // namespace teleop
