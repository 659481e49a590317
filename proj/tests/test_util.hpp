// Copyright 2026 The rcac-autopilot Authors
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

#include <random>

#include "rcac_autopilot/geometry.hpp"

namespace rcac_autopilot::test {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec3 random_vec3(std::mt19937_64& rng, double scale = 1.0) {
  return Vec3(uniform(rng, -scale, scale), uniform(rng, -scale, scale),
              uniform(rng, -scale, scale));
}

inline UnitQuaternion random_unit_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  UnitQuaternion q;
  q.eta = n(rng);
  q.eps = Vec3(n(rng), n(rng), n(rng));
  return q.normalized();
}

inline EulerAngles321 random_euler(std::mt19937_64& rng) {
  return EulerAngles321{uniform(rng, -kPi, kPi), uniform(rng, -0.49 * kPi, 0.49 * kPi),
                        uniform(rng, -kPi, kPi)};
}

}  // namespace rcac_autopilot::test
