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

#include "teleop/types.hpp"

namespace teleop {

std::string_view to_string(PayloadKind kind) {
  switch (kind) {
    case PayloadKind::kJointPositions:
      return "joint_positions";
    case PayloadKind::kEefDelta:
      return "eef_delta";
  }
  return "unknown";
}

const LimbCommand* LeaderCommand::find(std::string_view limb) const {
  for (const auto& l : limbs) {
    if (l.limb == limb) return &l;
  }
  return nullptr;
}

}  // namespace teleop
