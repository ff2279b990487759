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
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "crowdqf/errors.hpp"
#include "crowdqf/vec2.hpp"

namespace crowdqf {

/// Speeds below this are treated as standing still (m/s).
inline constexpr double kSpeedEpsilon = 1e-3;
/// Internal time grid; every input is resampled onto it (s).
inline constexpr double kCanonicalDt = 0.1;
inline constexpr double kDefaultBodyRadius = 0.3;
inline constexpr double kDefaultPersonalRadius = 0.5;
/// Comfort speed used when an agent never moves and none is given (m/s).
inline constexpr double kFallbackComfortSpeed = 1.4;

struct AgentStatics {
  int agent_id{0};
  double body_radius{kDefaultBodyRadius};
  double personal_radius{kDefaultPersonalRadius};
};

struct AgentIndividuals {
  Vec2 goal{};
  double comfort_speed{kFallbackComfortSpeed};
};

struct AgentState {
  Vec2 position{};
  Vec2 velocity{};
  double heading{0.0};
  double speed{0.0};
};

struct CharacterTrajectory {
  AgentStatics statics;
  AgentIndividuals individuals;
  std::vector<AgentState> states;
};

/// N characters sharing one uniform time axis t0, t0 + dt, ...
struct CrowdTrajectory {
  std::vector<CharacterTrajectory> characters;
  double dt{kCanonicalDt};
  double t0{0.0};

  [[nodiscard]] std::size_t num_agents() const noexcept { return characters.size(); }
  [[nodiscard]] std::size_t num_steps() const noexcept {
    return characters.empty() ? 0 : characters.front().states.size();
  }
  [[nodiscard]] const AgentState& state(std::size_t agent, std::size_t step) const {
    return characters[agent].states[step];
  }
};

/// Positions-only input for one agent. Missing goal defaults to the last
/// position; missing comfort speed defaults to the median observed speed.
struct AgentTrack {
  AgentStatics statics;
  std::optional<Vec2> goal;
  std::optional<double> comfort_speed;
  std::vector<Vec2> positions;
};

namespace detail {

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

// Forward differences, backward difference on the last step. Heading is
// carried through near-zero speeds and starts toward the goal.
inline std::vector<AgentState> states_from_positions(std::span<const Vec2> positions, double dt,
                                                     const Vec2& goal) {
  const std::size_t steps = positions.size();
  std::vector<AgentState> states(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    const std::size_t from = t + 1 < steps ? t : t - 1;
    AgentState& s = states[t];
    s.position = positions[t];
    s.velocity = (positions[from + 1] - positions[from]) / dt;
    s.speed = norm(s.velocity);
    if (s.speed > kSpeedEpsilon) {
      s.heading = std::atan2(s.velocity.y, s.velocity.x);
    } else if (t > 0) {
      s.heading = states[t - 1].heading;
    } else {
      const Vec2 to_goal = goal - positions[0];
      s.heading = squared_norm(to_goal) > 0.0 ? std::atan2(to_goal.y, to_goal.x) : 0.0;
    }
  }
  return states;
}

}  // namespace detail

/// Builds a crowd from per-agent positions sampled every `dt` seconds.
/// Throws MalformedInput when an agent has fewer than two positions or the
/// agents disagree on the number of steps.
[[nodiscard]] inline CrowdTrajectory derive_kinematics(std::span<const AgentTrack> tracks, double dt,
                                                       double t0 = 0.0) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (tracks.empty()) throw MalformedInput("crowd has no agents");
  CrowdTrajectory crowd;
  crowd.dt = dt;
  crowd.t0 = t0;
  crowd.characters.reserve(tracks.size());
  const std::size_t steps = tracks.front().positions.size();
  for (const AgentTrack& track : tracks) {
    if (track.positions.size() < 2) {
      throw MalformedInput("agent " + std::to_string(track.statics.agent_id) + " has fewer than 2 timesteps");
    }
    if (track.positions.size() != steps) {
      throw MalformedInput("agent " + std::to_string(track.statics.agent_id) + " has " +
                           std::to_string(track.positions.size()) + " timesteps, expected " + std::to_string(steps));
    }
    CharacterTrajectory ch;
    ch.statics = track.statics;
    ch.individuals.goal = track.goal.value_or(track.positions.back());
    ch.states = detail::states_from_positions(track.positions, dt, ch.individuals.goal);
    if (track.comfort_speed) {
      ch.individuals.comfort_speed = *track.comfort_speed;
    } else {
      std::vector<double> speeds;
      speeds.reserve(ch.states.size());
      for (const AgentState& s : ch.states) speeds.push_back(s.speed);
      const double med = detail::median(std::move(speeds));
      ch.individuals.comfort_speed = med > kSpeedEpsilon ? med : kFallbackComfortSpeed;
    }
    crowd.characters.push_back(std::move(ch));
  }
  return crowd;
}

/// Positions-only convenience: agent ids 0..N-1 and default radii.
[[nodiscard]] inline CrowdTrajectory derive_kinematics(const std::vector<std::vector<Vec2>>& positions, double dt) {
  std::vector<AgentTrack> tracks(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    tracks[i].statics.agent_id = static_cast<int>(i);
    tracks[i].positions = positions[i];
  }
  return derive_kinematics(tracks, dt);
}

/// Per-agent position lists of a crowd.
[[nodiscard]] inline std::vector<std::vector<Vec2>> positions_of(const CrowdTrajectory& crowd) {
  std::vector<std::vector<Vec2>> out(crowd.num_agents());
  for (std::size_t n = 0; n < crowd.num_agents(); ++n) {
    out[n].reserve(crowd.num_steps());
    for (const AgentState& s : crowd.characters[n].states) out[n].push_back(s.position);
  }
  return out;
}

/// Same agents (statics, goals, comfort speeds), new positions; kinematics re-derived.
[[nodiscard]] inline CrowdTrajectory with_positions(const CrowdTrajectory& like,
                                                    const std::vector<std::vector<Vec2>>& positions, double dt,
                                                    double t0) {
  if (positions.size() != like.num_agents()) throw InvalidArgument("position list does not match agent count");
  std::vector<AgentTrack> tracks(positions.size());
  for (std::size_t n = 0; n < positions.size(); ++n) {
    const CharacterTrajectory& ch = like.characters[n];
    tracks[n] = AgentTrack{ch.statics, ch.individuals.goal, ch.individuals.comfort_speed, positions[n]};
  }
  return derive_kinematics(tracks, dt, t0);
}

/// Linear interpolation of positions onto t0, t0 + dt_out, ... within the
/// original time span.
[[nodiscard]] inline CrowdTrajectory resample(const CrowdTrajectory& crowd, double dt_out) {
  if (!(dt_out > 0.0) || !std::isfinite(dt_out)) throw InvalidArgument("dt_out must be positive");
  const std::size_t steps_in = crowd.num_steps();
  if (steps_in < 2) throw MalformedInput("cannot resample fewer than 2 timesteps");
  const double ratio = dt_out / crowd.dt;
  const auto steps_out =
      static_cast<std::size_t>(std::floor(static_cast<double>(steps_in - 1) / ratio + 1e-9)) + 1;
  if (steps_out < 2) throw MalformedInput("resampled trajectory would have fewer than 2 timesteps");
  std::vector<std::vector<Vec2>> positions(crowd.num_agents(), std::vector<Vec2>(steps_out));
  for (std::size_t k = 0; k < steps_out; ++k) {
    const double u = static_cast<double>(k) * ratio;
    const auto i = std::min(static_cast<std::size_t>(std::floor(u)), steps_in - 2);
    const double frac = u - static_cast<double>(i);
    for (std::size_t n = 0; n < crowd.num_agents(); ++n) {
      const Vec2& a = crowd.characters[n].states[i].position;
      const Vec2& b = crowd.characters[n].states[i + 1].position;
      positions[n][k] = frac == 0.0 ? a : a + frac * (b - a);
    }
  }
  return with_positions(crowd, positions, dt_out, crowd.t0);
}

/// Window [first, first + count) of the time axis, kinematics re-derived.
[[nodiscard]] inline CrowdTrajectory slice(const CrowdTrajectory& crowd, std::size_t first, std::size_t count) {
  if (count < 2 || first + count > crowd.num_steps()) throw InvalidArgument("window outside the trajectory");
  auto positions = positions_of(crowd);
  for (auto& p : positions) {
    p = std::vector<Vec2>(p.begin() + static_cast<std::ptrdiff_t>(first),
                          p.begin() + static_cast<std::ptrdiff_t>(first + count));
  }
  return with_positions(crowd, positions, crowd.dt, crowd.t0 + static_cast<double>(first) * crowd.dt);
}

struct Violation {
  std::string kind;
  int agent_id{-1};
  long step{-1};
  std::string message;
};

using ValidationReport = std::vector<Violation>;

/// Lists every broken type invariant; empty iff the crowd is well formed.
[[nodiscard]] inline ValidationReport validate(const CrowdTrajectory& crowd) {
  ValidationReport report;
  if (!(crowd.dt > 0.0) || !std::isfinite(crowd.dt)) report.push_back({"dt", -1, -1, "dt must be positive"});
  if (crowd.characters.empty()) report.push_back({"empty", -1, -1, "crowd has no characters"});
  // Agents shorter than the longest one are the ragged ones.
  std::size_t steps = 0;
  for (const CharacterTrajectory& ch : crowd.characters) steps = std::max(steps, ch.states.size());
  std::unordered_set<int> seen;
  for (const CharacterTrajectory& ch : crowd.characters) {
    const int id = ch.statics.agent_id;
    if (!seen.insert(id).second) {
      report.push_back({"duplicate-id", id, -1, "agent_id " + std::to_string(id) + " appears more than once"});
    }
    if (!(ch.statics.body_radius > 0.0)) report.push_back({"radius", id, -1, "body radius must be positive"});
    if (!(ch.statics.personal_radius >= ch.statics.body_radius)) {
      report.push_back({"radius", id, -1, "personal radius smaller than body radius"});
    }
    if (!(ch.individuals.comfort_speed > 0.0)) {
      report.push_back({"comfort-speed", id, -1, "comfort speed must be positive"});
    }
    if (!is_finite(ch.individuals.goal)) report.push_back({"nan", id, -1, "goal is not finite"});
    if (ch.states.empty() || ch.states.size() != steps) {
      report.push_back({"ragged", id, -1,
                        "agent has " + std::to_string(ch.states.size()) + " states, expected " + std::to_string(steps)});
    }
    for (std::size_t t = 0; t < ch.states.size(); ++t) {
      const AgentState& s = ch.states[t];
      if (!is_finite(s.position) || !is_finite(s.velocity) || !std::isfinite(s.heading) || !std::isfinite(s.speed)) {
        report.push_back({"nan", id, static_cast<long>(t),
                          "non-finite state for agent " + std::to_string(id) + " at step " + std::to_string(t)});
      }
    }
  }
  return report;
}

}  // namespace crowdqf
