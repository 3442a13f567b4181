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

// JSON-over-WebSocket message schema. See PROTOCOL.md.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "teleop/leader.hpp"
#include "teleop/session.hpp"

namespace teleop::protocol {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum class Kind { kStateUpdate, kLeaderInput, kSessionEvent, kFeedbackUpdate, kModelInfo, kError };

std::string_view to_string(Kind k);
std::optional<Kind> kind_from_string(std::string_view s);

struct WireMessage {
  Kind kind = Kind::kError;
  std::uint64_t seq = 0;
  json payload = json::object();

  friend bool operator==(const WireMessage&, const WireMessage&) = default;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

std::string encode(const WireMessage& m);
/// Throws ProtocolError on malformed JSON, unknown kinds or a missing seq/payload.
WireMessage decode(std::string_view text);

json model_info(const RobotModel& model);
json state_update(const EngineSnapshot& snap, const RobotModel& model);
json session_event(const SessionEvent& e);
json feedback_update(const FeedbackTorques& f);
json error_payload(const std::string& message, std::optional<std::uint64_t> in_reply_to = std::nullopt);

/// leader_input payload: {"event": "drag"|"start"|"end", "limb", "delta_translation": [x,y,z],
/// "delta_rotation_quat": [x,y,z,w], "gripper"}. Throws ProtocolError when malformed.
ConsoleInput parse_leader_input(const json& payload);
json leader_input_payload(const ConsoleInput& input);

}  // namespace teleop::protocol
