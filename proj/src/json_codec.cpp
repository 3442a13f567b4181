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

#include "teleop/json_codec.hpp"

#include "teleop/errors.hpp"

namespace teleop::codec {

namespace {

Eigen::Vector3d vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw Error(std::string(what) + ": expected 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw Error("expected a number array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

json pose_to_json(const Pose& p) {
  json r = json::array();
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) r.push_back(p.rotation()(i, k));
  }
  return {{"R", r}, {"t", vector_to_json(p.translation())}};
}

Pose pose_from_json(const json& j) {
  const json& r = j.at("R");
  if (!r.is_array() || r.size() != 9) throw Error("pose: R must hold 9 numbers");
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) m(i, k) = r[static_cast<std::size_t>(3 * i + k)].get<double>();
  }
  Pose p(m, vec3(j.at("t"), "pose.t"));
  if (!p.is_valid(1e-6)) throw Error("pose: R is not a rotation");
  return p;
}

json quaternion_to_json(const Eigen::Quaterniond& q) { return json::array({q.x(), q.y(), q.z(), q.w()}); }

Eigen::Quaterniond quaternion_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw Error("quaternion: expected [x, y, z, w]");
  Eigen::Quaterniond q(j[3].get<double>(), j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
  if (!q.coeffs().allFinite() || q.norm() < 1e-9) throw Error("quaternion: degenerate");
  return q.normalized();
}

json pose_to_wire(const Pose& p) {
  return {{"position", vector_to_json(p.translation())}, {"quaternion", quaternion_to_json(p.quaternion())}};
}

Pose pose_from_wire(const json& j) {
  return Pose::from_quaternion(quaternion_from_json(j.at("quaternion")), vec3(j.at("position"), "position"));
}

json command_to_json(const LeaderCommand& c) {
  json limbs = json::array();
  for (const auto& l : c.limbs) {
    json e = {{"limb", l.limb}, {"gripper", l.gripper}};
    if (const auto* jp = std::get_if<JointPositions>(&l.payload)) {
      e["joint_positions"] = vector_to_json(jp->q);
    } else {
      e["eef_delta"] = pose_to_json(std::get<EefDelta>(l.payload).delta);
    }
    limbs.push_back(std::move(e));
  }
  return {{"limbs", limbs}, {"start_requested", c.start_requested}, {"end_requested", c.end_requested}};
}

LeaderCommand command_from_json(const json& j) {
  LeaderCommand c;
  for (const auto& e : j.at("limbs")) {
    LimbCommand l;
    l.limb = e.at("limb").get<std::string>();
    l.gripper = e.value("gripper", 0.0);
    const bool joint = e.contains("joint_positions");
    const bool delta = e.contains("eef_delta");
    if (joint == delta) throw Error("command for limb '" + l.limb + "' must hold exactly one payload");
    if (joint) {
      l.payload = JointPositions{vector_from_json(e.at("joint_positions"))};
    } else {
      l.payload = EefDelta{pose_from_json(e.at("eef_delta"))};
    }
    c.limbs.push_back(std::move(l));
  }
  c.start_requested = j.value("start_requested", false);
  c.end_requested = j.value("end_requested", false);
  return c;
}

json flags_to_json(const LimbFlags& f) {
  return {{"limit_clamped", f.limit_clamped},
          {"velocity_clamped", f.velocity_clamped},
          {"collision_hold", f.collision_hold},
          {"ik_converged", f.ik_converged}};
}

LimbFlags flags_from_json(const json& j) {
  LimbFlags f;
  f.limit_clamped = j.value("limit_clamped", false);
  f.velocity_clamped = j.value("velocity_clamped", false);
  f.collision_hold = j.value("collision_hold", false);
  f.ik_converged = j.value("ik_converged", true);
  return f;
}

json feedback_to_json(const FeedbackTorques& f) {
  json limbs = json::array();
  for (const auto& l : f.limbs) {
    limbs.push_back({{"limb", l.limb},
                     {"bias", vector_to_json(l.bias)},
                     {"tracking", vector_to_json(l.tracking)},
                     {"gripper", l.gripper},
                     {"task_error", vector_to_json(l.task_error)},
                     {"stale", l.stale}});
  }
  return {{"limbs", limbs}, {"timestamp", f.timestamp}, {"sequence", f.sequence}};
}

FeedbackTorques feedback_from_json(const json& j) {
  FeedbackTorques f;
  f.timestamp = j.value("timestamp", 0.0);
  f.sequence = j.value("sequence", std::uint64_t{0});
  for (const auto& e : j.at("limbs")) {
    LimbFeedback l;
    l.limb = e.at("limb").get<std::string>();
    l.bias = vector_from_json(e.at("bias"));
    l.tracking = vector_from_json(e.at("tracking"));
    l.gripper = e.value("gripper", 0.0);
    if (e.contains("task_error")) {
      const auto v = vector_from_json(e.at("task_error"));
      if (v.size() != 6) throw Error("feedback: task_error must hold 6 numbers");
      l.task_error = v;
    }
    l.stale = e.value("stale", false);
    f.limbs.push_back(std::move(l));
  }
  return f;
}

}  // namespace teleop::codec
