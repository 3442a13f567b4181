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

#include <cstdlib>

#include "teleop/kernels.hpp"

namespace teleop::kernels {

std::vector<WorldSphere> place_spheres(const RobotModel& model, std::span<const JointVector> q) {
  if (q.size() != model.limbs.size()) {
    throw DimensionError("place_spheres: expected " + std::to_string(model.limbs.size()) + " limbs");
  }
  std::vector<WorldSphere> out;
  for (std::size_t l = 0; l < model.limbs.size(); ++l) {
    const LimbChain& chain = model.limbs[l];
    if (chain.collision_spheres.empty()) continue;
    const auto frames = frame_positions(chain, q[l]);
    for (std::size_t s = 0; s < chain.collision_spheres.size(); ++s) {
      const auto& sphere = chain.collision_spheres[s];
      WorldSphere w;
      w.center = chain.base_in_root * (frames[static_cast<std::size_t>(sphere.frame)] * sphere.center);
      w.radius = sphere.radius;
      w.limb = static_cast<int>(l);
      w.frame = sphere.frame;
      w.index = static_cast<int>(s);
      out.push_back(w);
    }
  }
  return out;
}

std::vector<SpherePair> candidate_pairs(std::span<const WorldSphere> spheres) {
  std::vector<SpherePair> out;
  const int n = static_cast<int>(spheres.size());
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const auto& sa = spheres[static_cast<std::size_t>(a)];
      const auto& sb = spheres[static_cast<std::size_t>(b)];
      if (sa.limb == sb.limb && std::abs(sa.frame - sb.frame) <= 1) continue;
      out.push_back({a, b});
    }
  }
  return out;
}

std::vector<SpherePair> find_overlaps_serial(std::span<const WorldSphere> spheres,
                                             std::span<const SpherePair> candidates, double margin) {
  std::vector<SpherePair> out;
  for (const auto& p : candidates) {
    const auto& sa = spheres[static_cast<std::size_t>(p.a)];
    const auto& sb = spheres[static_cast<std::size_t>(p.b)];
    const double reach = sa.radius + sb.radius + margin;
    if ((sa.center - sb.center).squaredNorm() < reach * reach) {
      out.push_back(p);
    }
  }
  return out;
}

std::vector<IKResult> solve_batch_serial(std::span<const IKTask> tasks) {
  std::vector<IKResult> out;
  out.reserve(tasks.size());
  for (const auto& t : tasks) {
    out.push_back(solve(*t.chain, t.target, t.q0, *t.config));
  }
  return out;
}

}  // namespace teleop::kernels
