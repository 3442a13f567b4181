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

#include <exception>
#include <mutex>

#include "teleop/kernels.hpp"

namespace teleop::kernels {

std::vector<SpherePair> find_overlaps_parallel(std::span<const WorldSphere> spheres,
                                               std::span<const SpherePair> candidates, double margin) {
  const long n = static_cast<long>(candidates.size());
  std::vector<unsigned char> hit(candidates.size(), 0);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const auto& p = candidates[static_cast<std::size_t>(i)];
    const auto& sa = spheres[static_cast<std::size_t>(p.a)];
    const auto& sb = spheres[static_cast<std::size_t>(p.b)];
    const double reach = sa.radius + sb.radius + margin;
    hit[static_cast<std::size_t>(i)] = (sa.center - sb.center).squaredNorm() < reach * reach;
  }
  std::vector<SpherePair> out;
  for (std::size_t i = 0; i < hit.size(); ++i) {
    if (hit[i]) out.push_back(candidates[i]);
  }
  return out;
}

std::vector<IKResult> solve_batch_parallel(std::span<const IKTask> tasks) {
  const long n = static_cast<long>(tasks.size());
  std::vector<IKResult> out(tasks.size());
  std::exception_ptr error;
  std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    const auto& t = tasks[static_cast<std::size_t>(i)];
    try {
      out[static_cast<std::size_t>(i)] = solve(*t.chain, t.target, t.q0, *t.config);
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace teleop::kernels
