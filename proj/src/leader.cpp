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

#include <algorithm>
#include <set>

#include "teleop/leader.hpp"

namespace teleop {

Pose compute_delta(const Pose& t0, const Pose& tt, double scale) {
  const Pose d = inverse(t0) * tt;
  return Pose(d.rotation(), scale * d.translation());
}

LimbMapping LimbMapping::identity(const std::vector<std::string>& names, double scale) {
  LimbMapping m;
  for (const auto& n : names) m.entries.push_back({n, n, scale});
  return m;
}

void LimbMapping::validate() const {
  std::set<std::string> leaders;
  std::set<std::string> followers;
  for (const auto& e : entries) {
    if (!(e.scale > 0.0)) {
      throw MappingError("limb mapping: scale for '" + e.leader_limb + "' must be positive");
    }
    if (!leaders.insert(e.leader_limb).second) {
      throw MappingError("limb mapping: leader limb '" + e.leader_limb + "' mapped twice");
    }
    if (!followers.insert(e.follower_limb).second) {
      throw MappingError("limb mapping: follower limb '" + e.follower_limb + "' is the target of two leader limbs");
    }
  }
}

void LimbMapping::validate_against(const RobotModel& follower) const {
  validate();
  for (const auto& e : entries) {
    if (!follower.limb_index(e.follower_limb)) {
      throw MappingError("limb mapping: follower has no limb '" + e.follower_limb + "'");
    }
  }
}

const MappingEntry* LimbMapping::by_leader(std::string_view leader_limb) const {
  for (const auto& e : entries) {
    if (e.leader_limb == leader_limb) return &e;
  }
  return nullptr;
}

bool HoldDetector::update(double now, bool condition) {
  if (!condition) {
    since_.reset();
    armed_ = true;
    return false;
  }
  if (!armed_) return false;
  if (!since_) since_ = now;
  if (now - *since_ >= hold_) {
    armed_ = false;
    since_.reset();
    return true;
  }
  return false;
}

void HoldDetector::reset(bool armed) {
  armed_ = armed;
  since_.reset();
}

double GripperCalibration::normalize(double raw) const {
  const double span = raw_max - raw_min;
  if (span == 0.0) return 0.0;
  return std::clamp((raw - raw_min) / span, 0.0, 1.0);
}

}  // namespace teleop
