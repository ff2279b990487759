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


// Hand-rolled generators and fixtures shared by the test binaries.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "crowdqf/crowdqf.hpp"

namespace crowdqf::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Vec2 uniform_point(Rng& rng, double half_side) {
  return {uniform(rng, -half_side, half_side), uniform(rng, -half_side, half_side)};
}

/// Random crowd of `n` agents and `steps` states: correlated random walks
/// with random goals, radii and comfort speeds.
inline CrowdTrajectory random_crowd(Rng& rng, std::size_t n, std::size_t steps, double half_side = 6.0) {
  std::vector<AgentTrack> tracks(n);
  for (std::size_t i = 0; i < n; ++i) {
    AgentTrack& tr = tracks[i];
    const double body = uniform(rng, 0.2, 0.35);
    tr.statics = AgentStatics{static_cast<int>(i) + 1, body, body + uniform(rng, 0.0, 0.3)};
    tr.goal = uniform_point(rng, half_side * 2.0);
    tr.comfort_speed = uniform(rng, 0.8, 2.0);
    Vec2 p = uniform_point(rng, half_side);
    double heading = uniform(rng, -M_PI, M_PI);
    double speed = uniform(rng, 0.0, 2.0);
    for (std::size_t t = 0; t < steps; ++t) {
      tr.positions.push_back(p);
      heading += uniform(rng, -0.4, 0.4);
      speed = std::clamp(speed + uniform(rng, -0.2, 0.2), 0.0, 2.5);
      p += kCanonicalDt * speed * Vec2{std::cos(heading), std::sin(heading)};
    }
  }
  return derive_kinematics(tracks, kCanonicalDt);
}

/// Rotates by `angle` then translates by `offset`, positions and goals alike.
inline CrowdTrajectory rigid_motion(const CrowdTrajectory& crowd, double angle, Vec2 offset) {
  std::vector<AgentTrack> tracks;
  for (const CharacterTrajectory& ch : crowd.characters) {
    AgentTrack tr;
    tr.statics = ch.statics;
    tr.goal = rotated(ch.individuals.goal, angle) + offset;
    tr.comfort_speed = ch.individuals.comfort_speed;
    for (const AgentState& s : ch.states) tr.positions.push_back(rotated(s.position, angle) + offset);
    tracks.push_back(std::move(tr));
  }
  return derive_kinematics(tracks, crowd.dt, crowd.t0);
}

/// One agent per row of `positions`, goals at the last position.
inline CrowdTrajectory crowd_from(const std::vector<std::vector<Vec2>>& positions, double dt = kCanonicalDt) {
  return derive_kinematics(positions, dt);
}

inline bool collision_free(const CrowdTrajectory& crowd) {
  const FeatureMap f = extract(crowd);
  for (double v : f[FeatureId::kCOL].values) {
    if (v != 0.0) return false;
  }
  return true;
}

// Golden-like simulator fixture: dense crossing flows under the default
// social-forces parameters, keeping only collision-free runs.
inline constexpr double kFixtureDensity = 2.5;
inline constexpr double kFixtureDuration = 8.0;
inline constexpr std::size_t kFixtureAgents = 20;

inline Scenario fixture_scenario(std::uint64_t seed) {
  Scenario s;
  s.kind = ScenarioKind::kCrossing;
  s.agent_count = kFixtureAgents;
  s.density = kFixtureDensity;
  s.seed = seed;
  return s;
}

/// `count` collision-free crowds, scanning seeds upward from `first_seed`.
inline std::vector<CrowdTrajectory> golden_crowds(std::size_t count, std::uint64_t first_seed) {
  std::vector<CrowdTrajectory> out;
  for (std::uint64_t seed = first_seed; out.size() < count; ++seed) {
    if (seed - first_seed > 50 * count) throw InsufficientData("fixture: too few collision-free runs");
    CrowdTrajectory c = simulate(fixture_scenario(seed), SocialForcesParams{}, kFixtureDuration);
    if (collision_free(c)) out.push_back(std::move(c));
  }
  return out;
}

inline ReferenceStats fit_on(const std::vector<CrowdTrajectory>& crowds) {
  std::vector<FeatureMap> maps;
  for (const CrowdTrajectory& c : crowds) maps.push_back(extract(c));
  return fit_reference(maps);
}

}  // namespace crowdqf::testing
