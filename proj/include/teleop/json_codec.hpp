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

// JSON encodings shared by the recorder and the service. Recordings keep rotations as
// row-major 3x3 matrices so a record/replay/record cycle is bit-exact; the wire protocol
// uses [x, y, z, w] quaternions.

#include <json.hpp>

#include "teleop/types.hpp"

namespace teleop::codec {

using nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const json& j);

/// {"R": [9 values, row-major], "t": [x, y, z]}
json pose_to_json(const Pose& p);
Pose pose_from_json(const json& j);

/// {"position": [x, y, z], "quaternion": [x, y, z, w]}
json pose_to_wire(const Pose& p);
Pose pose_from_wire(const json& j);

json quaternion_to_json(const Eigen::Quaterniond& q);
Eigen::Quaterniond quaternion_from_json(const json& j);

json command_to_json(const LeaderCommand& c);
LeaderCommand command_from_json(const json& j);

json flags_to_json(const LimbFlags& f);
LimbFlags flags_from_json(const json& j);

json feedback_to_json(const FeedbackTorques& f);
FeedbackTorques feedback_from_json(const json& j);

}  // namespace teleop::codec
