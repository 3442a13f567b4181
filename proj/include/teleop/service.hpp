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
#include <thread>

#include "teleop/config.hpp"
#include "teleop/session.hpp"

namespace teleop {

struct ServiceStats {
  std::uint64_t connections = 0;
  std::uint64_t inputs = 0;
  std::uint64_t errors_sent = 0;
  std::uint64_t state_updates_dropped = 0;
};

/// WebSocket endpoint at /ws streaming model_info, state_update, session_event and
/// feedback_update to every client and feeding leader_input to the console leader.
/// Runs on its own I/O thread and reads the engine only through EngineView.
class Service {
 public:
  Service(EngineView& engine, ServiceConfig config);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and starts serving. Throws Error when the address cannot be bound. Port 0 picks
  /// a free port, see port().
  void start();
  void stop();

  unsigned short port() const;
  std::size_t client_count() const;
  ServiceStats stats() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace teleop
