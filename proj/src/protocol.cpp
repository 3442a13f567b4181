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

#include "teleop/protocol.hpp"

#include <cmath>

#include "teleop/json_codec.hpp"

namespace teleop::protocol {

namespace {

constexpr std::pair<Kind, std::string_view> kKinds[] = {
    {Kind::kStateUpdate, "state_update"},     {Kind::kLeaderInput, "leader_input"},
    {Kind::kSessionEvent, "session_event"},   {Kind::kFeedbackUpdate, "feedback_update"},
    {Kind::kModelInfo, "model_info"},         {Kind::kError, "error"},
};

json joint_type(const JointSpec& j) {
  if (j.continuous) return "continuous";
  return j.kind == JointKind::kPrismatic ? "prismatic" : "revolute";
}

}  // namespace

std::string_view to_string(Kind k) {
  for (const auto& [kind, name] : kKinds) {
    if (kind == k) return name;
  }
  return "error";
}

std::optional<Kind> kind_from_string(std::string_view s) {
  for (const auto& [kind, name] : kKinds) {
    if (name == s) return kind;
  }
  return std::nullopt;
}

std::string encode(const WireMessage& m) {
  return json{{"kind", to_string(m.kind)}, {"seq", m.seq}, {"payload", m.payload}}.dump();
}

WireMessage decode(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ProtocolError("message must be a JSON object");
  if (!j.contains("kind") || !j["kind"].is_string()) throw ProtocolError("message needs a string 'kind'");
  const auto kind = kind_from_string(j["kind"].get<std::string>());
  if (!kind) throw ProtocolError("unknown message kind '" + j["kind"].get<std::string>() + "'");
  if (!j.contains("seq") || !j["seq"].is_number_unsigned()) throw ProtocolError("message needs an unsigned 'seq'");
  WireMessage m;
  m.kind = *kind;
  m.seq = j["seq"].get<std::uint64_t>();
  if (!j.contains("payload")) throw ProtocolError("message needs a 'payload'");
  m.payload = j["payload"];
  if (!m.payload.is_object()) throw ProtocolError("'payload' must be an object");
  return m;
}

json model_info(const RobotModel& model) {
  json limbs = json::array();
  for (std::size_t l = 0; l < model.limbs.size(); ++l) {
    const auto& chain = model.limbs[l];
    json joints = json::array();
    for (const auto& j : chain.joints) {
      joints.push_back({{"name", j.name},
                        {"type", joint_type(j)},
                        {"lower", j.lower},
                        {"upper", j.upper},
                        {"velocity_limit", j.velocity_limit}});
    }
    json spheres = json::array();
    for (const auto& s : chain.collision_spheres) {
      spheres.push_back({{"frame", s.frame}, {"center", codec::vector_to_json(s.center)}, {"radius", s.radius}});
    }
    json limb = {{"name", chain.name},
                 {"joints", joints},
                 {"base_pose", codec::vector_to_json(model.base_pose[l])},
                 {"base_in_root", codec::pose_to_wire(chain.base_in_root)},
                 {"spheres", spheres},
                 {"gripper", chain.gripper_joint ? json(chain.gripper_joint->name) : json(nullptr)}};
    limbs.push_back(std::move(limb));
  }
  return {{"schema_version", kSchemaVersion}, {"robot", model.name}, {"limbs", limbs}};
}

json state_update(const EngineSnapshot& snap, const RobotModel& model) {
  json limbs = json::array();
  for (std::size_t l = 0; l < model.limbs.size(); ++l) {
    const auto& chain = model.limbs[l];
    json limb = {{"name", chain.name}};
    if (l < snap.follower.q_actual.size()) {
      const auto& q = snap.follower.q_actual[l];
      limb["q_actual"] = codec::vector_to_json(q);
      limb["T_actual"] = codec::pose_to_wire(snap.follower.T_actual[l]);
      json frames = json::array();
      for (const auto& f : frame_positions(chain, q)) {
        frames.push_back(codec::vector_to_json(chain.base_in_root * f.translation()));
      }
      limb["frames"] = frames;
      limb["gripper_actual"] = snap.follower.gripper_actual[l];
    }
    if (snap.signal && l < snap.signal->q_cmd.size()) {
      limb["q_cmd"] = codec::vector_to_json(snap.signal->q_cmd[l]);
      limb["T_cmd"] = codec::pose_to_wire(snap.signal->T_cmd[l]);
      limb["gripper_cmd"] = snap.signal->gripper_cmd[l];
      limb["flags"] = codec::flags_to_json(snap.signal->flags[l]);
    } else {
      limb["q_cmd"] = nullptr;
      limb["T_cmd"] = nullptr;
      limb["gripper_cmd"] = nullptr;
      limb["flags"] = codec::flags_to_json(LimbFlags{});
    }
    limbs.push_back(std::move(limb));
  }
  return {{"state", to_string(snap.state)}, {"time", snap.time}, {"recording", snap.recording}, {"limbs", limbs}};
}

json session_event(const SessionEvent& e) {
  return {{"time", e.time}, {"from", to_string(e.from)}, {"to", to_string(e.to)}, {"reason", e.reason}};
}

json feedback_update(const FeedbackTorques& f) { return codec::feedback_to_json(f); }

json error_payload(const std::string& message, std::optional<std::uint64_t> in_reply_to) {
  json p = {{"message", message}};
  p["in_reply_to"] = in_reply_to ? json(*in_reply_to) : json(nullptr);
  return p;
}

ConsoleInput parse_leader_input(const json& payload) {
  ConsoleInput in;
  try {
    const auto event = payload.value("event", std::string("drag"));
    if (event == "start") {
      in.event = ConsoleInput::Event::kStart;
      return in;
    }
    if (event == "end") {
      in.event = ConsoleInput::Event::kEnd;
      return in;
    }
    if (event != "drag") throw ProtocolError("leader_input: unknown event '" + event + "'");
    in.event = ConsoleInput::Event::kDrag;
    if (!payload.contains("limb") || !payload["limb"].is_string()) throw ProtocolError("leader_input: drag needs 'limb'");
    in.limb = payload["limb"].get<std::string>();
    if (payload.contains("delta_translation")) {
      const auto v = codec::vector_from_json(payload["delta_translation"]);
      if (v.size() != 3) throw ProtocolError("leader_input: delta_translation needs 3 numbers");
      in.delta_translation = v;
    }
    if (payload.contains("delta_rotation_quat")) in.delta_rotation = codec::quaternion_from_json(payload["delta_rotation_quat"]);
    if (payload.contains("gripper") && !payload["gripper"].is_null()) in.gripper = payload["gripper"].get<double>();
  } catch (const ProtocolError&) {
    throw;
  } catch (const std::exception& e) {
    throw ProtocolError(std::string("leader_input: ") + e.what());
  }
  if (!in.delta_translation.allFinite() || (in.gripper && !std::isfinite(*in.gripper))) {
    throw ProtocolError("leader_input: non-finite value");
  }
  return in;
}

json leader_input_payload(const ConsoleInput& input) {
  switch (input.event) {
    case ConsoleInput::Event::kStart:
      return {{"event", "start"}};
    case ConsoleInput::Event::kEnd:
      return {{"event", "end"}};
    case ConsoleInput::Event::kDrag:
      break;
  }
  json p = {{"event", "drag"},
            {"limb", input.limb},
            {"delta_translation", codec::vector_to_json(input.delta_translation)},
            {"delta_rotation_quat", codec::quaternion_to_json(input.delta_rotation)}};
  p["gripper"] = input.gripper ? json(*input.gripper) : json(nullptr);
  return p;
}

}  // namespace teleop::protocol
