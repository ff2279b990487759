// Copyright 2026 The crowdqf Authors
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

#include <algorithm>
#include <cmath>

#include "crowdqf/core.hpp"
#include "crowdqf/vec2.hpp"

// Pairwise predictions under linear extrapolation of both agents.

namespace crowdqf {

/// Prediction cap for time to collision (s).
inline constexpr double kDefaultTtcHorizon = 10.0;

struct ClosestApproach {
  double tca{0.0};
  double dca{0.0};
};

struct PairPrediction {
  double tca{0.0};
  double dca{0.0};
  double ttc{kDefaultTtcHorizon};
};

[[nodiscard]] inline ClosestApproach closest_approach(const Vec2& p_a, const Vec2& v_a, const Vec2& p_b,
                                                      const Vec2& v_b) noexcept {
  const Vec2 dp = p_b - p_a;
  const Vec2 dv = v_b - v_a;
  const double dv2 = squared_norm(dv);
  if (dv2 < kSpeedEpsilon * kSpeedEpsilon) return {0.0, norm(dp)};
  const double tca = std::max(0.0, -dot(dp, dv) / dv2);
  return {tca, norm(dp + tca * dv)};
}

/// First time the discs touch, or `horizon` if they never do (or only after
/// it). Overlapping discs give 0.
[[nodiscard]] inline double time_to_collision(const Vec2& p_a, const Vec2& v_a, double r_a, const Vec2& p_b,
                                              const Vec2& v_b, double r_b,
                                              double horizon = kDefaultTtcHorizon) noexcept {
  const Vec2 dp = p_b - p_a;
  const Vec2 dv = v_b - v_a;
  const double reach = r_a + r_b;
  const double c = squared_norm(dp) - reach * reach;
  if (c <= 0.0) return 0.0;
  const double a = squared_norm(dv);
  const double b = 2.0 * dot(dp, dv);
  if (a < kSpeedEpsilon * kSpeedEpsilon || b >= 0.0) return horizon;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return horizon;
  // b < 0: the smaller root is c / q with q = (-b + sqrt(disc)) / 2 > 0.
  const double q = 0.5 * (-b + std::sqrt(disc));
  return std::min(c / q, horizon);
}

[[nodiscard]] inline PairPrediction predict_pair(const AgentState& a, double r_a, const AgentState& b, double r_b,
                                                 double horizon = kDefaultTtcHorizon) noexcept {
  const ClosestApproach ca = closest_approach(a.position, a.velocity, b.position, b.velocity);
  return {ca.tca, ca.dca, time_to_collision(a.position, a.velocity, r_a, b.position, b.velocity, r_b, horizon)};
}

}  // namespace crowdqf
