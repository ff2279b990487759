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
#include <cstdint>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "crowdqf/core.hpp"
#include "crowdqf/ga.hpp"
#include "crowdqf/text.hpp"

namespace crowdqf {

/// Agents closer than this to their goal walk straight onto it and stop (m).
inline constexpr double kArrivalRadius = 0.3;

struct SocialForcesParams {
  double relaxation_time{0.5};     // s
  double repulsion_strength{20.0}; // m/s^2
  double repulsion_range{0.3};     // m
  double max_speed{2.5};           // m/s
  double noise_amplitude{0.02};    // m/s^2
};

inline void validate(const SocialForcesParams& p) {
  // repulsion_strength 0 switches interaction off.
  if (!(p.relaxation_time > 0.0) || !(p.repulsion_strength >= 0.0) || !(p.repulsion_range > 0.0) ||
      !(p.max_speed > 0.0) || !(p.noise_amplitude >= 0.0)) {
    throw ConfigurationError("social-forces parameters must be positive (repulsion_strength, noise_amplitude >= 0)");
  }
  if (!std::isfinite(p.relaxation_time) || !std::isfinite(p.repulsion_strength) || !std::isfinite(p.repulsion_range) ||
      !std::isfinite(p.max_speed) || !std::isfinite(p.noise_amplitude)) {
    throw ConfigurationError("social-forces parameters must be finite");
  }
}

enum class ScenarioKind { kCircle, kCrossing, kRandom };

struct Scenario {
  ScenarioKind kind{ScenarioKind::kCircle};
  std::size_t agent_count{20};
  double crossing_angle_deg{90.0};  // crossing: angle between the two flows
  double radius{8.0};               // circle: spawn radius (m)
  double density{0.5};              // crossing/random: spawn density (persons/m^2)
  std::uint64_t seed{0};
  double body_radius{kDefaultBodyRadius};
};

[[nodiscard]] inline std::string to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::kCircle: return "circle";
    case ScenarioKind::kCrossing: return "crossing";
    case ScenarioKind::kRandom: return "random";
  }
  return "circle";
}

[[nodiscard]] inline ScenarioKind parse_scenario_kind(const std::string& s) {
  if (s == "circle") return ScenarioKind::kCircle;
  if (s == "crossing") return ScenarioKind::kCrossing;
  if (s == "random") return ScenarioKind::kRandom;
  throw ConfigurationError("unknown scenario kind '" + s + "'");
}

struct SimAgent {
  int id{0};
  Vec2 position{};
  Vec2 velocity{};
  Vec2 goal{};
  double comfort_speed{1.4};
  double body_radius{kDefaultBodyRadius};
  double personal_radius{kDefaultPersonalRadius};
  bool arrived{false};
};

namespace detail {

// Hexagonal lattice points with the given spacing inside a side x side square
// centred at the origin, growing the square until `count` points fit.
inline std::vector<Vec2> hex_lattice(std::size_t count, double spacing, double side) {
  const double row = spacing * std::sqrt(3.0) / 2.0;
  for (;;) {
    std::vector<Vec2> pts;
    const double half = side / 2.0;
    std::size_t r = 0;
    for (double y = -half; y <= half + 1e-12; y += row, ++r) {
      const double offset = (r % 2 == 1) ? spacing / 2.0 : 0.0;
      for (double x = -half + offset; x <= half + 1e-12; x += spacing) pts.push_back({x, y});
    }
    if (pts.size() >= count) return pts;
    side *= 1.05;
  }
}

// `count` jittered lattice sites at the target density; jitter keeps discs of
// `body_radius` disjoint.
inline std::vector<Vec2> lattice_sites(std::size_t count, double density, double body_radius, std::mt19937_64& rng) {
  if (!(density > 0.0)) throw ConfigurationError("scenario density must be positive");
  const double spacing = std::sqrt(2.0 / (std::sqrt(3.0) * density));
  if (spacing <= 2.0 * body_radius) {
    throw ConfigurationError("cannot place " + std::to_string(count) + " agents at density " +
                             text::format_double(density) + " without overlapping bodies");
  }
  std::vector<Vec2> pts = hex_lattice(count, spacing, std::sqrt(static_cast<double>(count) / density));
  std::shuffle(pts.begin(), pts.end(), rng);
  pts.resize(count);
  const double jitter = 0.45 * (spacing - 2.0 * body_radius);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Vec2& p : pts) {
    const double a = 2.0 * std::numbers::pi * unit(rng);
    const double r = jitter * std::sqrt(unit(rng));
    p += Vec2{r * std::cos(a), r * std::sin(a)};
  }
  return pts;
}

inline bool any_overlap(const std::vector<SimAgent>& agents) {
  for (std::size_t a = 0; a < agents.size(); ++a) {
    for (std::size_t b = a + 1; b < agents.size(); ++b) {
      if (distance(agents[a].position, agents[b].position) < agents[a].body_radius + agents[b].body_radius) return true;
    }
  }
  return false;
}

}  // namespace detail

/// Initial positions, goals and comfort speeds for a scenario.
[[nodiscard]] inline std::vector<SimAgent> make_scenario(const Scenario& spec) {
  if (spec.agent_count < 1) throw ConfigurationError("scenario needs at least one agent");
  if (!(spec.body_radius > 0.0)) throw ConfigurationError("body radius must be positive");
  const std::size_t n = spec.agent_count;
  std::vector<SimAgent> agents(n);
  std::mt19937_64 speed_rng(split_seed(spec.seed, 1));
  std::normal_distribution<double> speed(1.4, 0.15);
  for (std::size_t i = 0; i < n; ++i) {
    agents[i].id = static_cast<int>(i);
    agents[i].body_radius = spec.body_radius;
    agents[i].personal_radius = std::max(kDefaultPersonalRadius, spec.body_radius);
    agents[i].comfort_speed = std::clamp(speed(speed_rng), 0.8, 2.0);
  }
  std::mt19937_64 rng(split_seed(spec.seed, 2));

  switch (spec.kind) {
    case ScenarioKind::kCircle: {
      if (!(spec.radius > 0.0)) throw ConfigurationError("circle radius must be positive");
      if (n > 1 && 2.0 * spec.radius * std::sin(std::numbers::pi / static_cast<double>(n)) <= 2.0 * spec.body_radius) {
        throw ConfigurationError("circle of radius " + text::format_double(spec.radius) + " cannot hold " +
                                 std::to_string(n) + " agents");
      }
      for (std::size_t i = 0; i < n; ++i) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        agents[i].position = {spec.radius * std::cos(a), spec.radius * std::sin(a)};
        agents[i].goal = -agents[i].position;
      }
      break;
    }
    case ScenarioKind::kCrossing: {
      const std::size_t n_a = (n + 1) / 2;
      const std::size_t n_b = n - n_a;
      const double angle = spec.crossing_angle_deg * std::numbers::pi / 180.0;
      const double side = std::sqrt(static_cast<double>(n_a) / spec.density);
      const double offset = 0.75 * side * std::numbers::sqrt2 + 2.0;
      std::size_t next = 0;
      for (const auto& [count, heading] : {std::pair{n_a, 0.0}, std::pair{n_b, angle}}) {
        if (count == 0) continue;
        const Vec2 dir{std::cos(heading), std::sin(heading)};
        for (const Vec2& local : detail::lattice_sites(count, spec.density, spec.body_radius, rng)) {
          SimAgent& ag = agents[next++];
          ag.position = rotated(local, heading) - offset * dir;
          ag.goal = ag.position + 2.0 * offset * dir;
        }
      }
      if (detail::any_overlap(agents)) {
        throw ConfigurationError("crossing flows overlap at angle " + text::format_double(spec.crossing_angle_deg));
      }
      break;
    }
    case ScenarioKind::kRandom: {
      // Goals come from a sparser lattice over a 3x wider square, so walks
      // are long compared with the spawn area.
      const std::vector<Vec2> spawns = detail::lattice_sites(n, spec.density, spec.body_radius, rng);
      const std::vector<Vec2> goals = detail::lattice_sites(n, spec.density / 9.0, spec.body_radius, rng);
      for (std::size_t i = 0; i < n; ++i) {
        agents[i].position = spawns[i];
        agents[i].goal = goals[i];
      }
      break;
    }
  }
  // Ambient crowds: everyone is already walking towards their goal.
  for (SimAgent& a : agents) a.velocity = a.comfort_speed * normalized(a.goal - a.position);
  return agents;
}

/// Sum of pairwise repulsive accelerations acting on each agent.
[[nodiscard]] inline std::vector<Vec2> repulsion_accelerations(const std::vector<SimAgent>& agents,
                                                               const SocialForcesParams& params) {
  std::vector<Vec2> acc(agents.size());
  for (std::size_t a = 0; a < agents.size(); ++a) {
    for (std::size_t b = a + 1; b < agents.size(); ++b) {
      const Vec2 away = agents[a].position - agents[b].position;  // from b towards a
      const double d = norm(away);
      if (d == 0.0) continue;
      const double magnitude = params.repulsion_strength *
                               std::exp((agents[a].body_radius + agents[b].body_radius - d) / params.repulsion_range);
      const Vec2 f = (magnitude / d) * away;
      acc[a] += f;
      acc[b] -= f;
    }
  }
  return acc;
}

/// One explicit-Euler step of the social-forces model. `noise_rng` may be
/// null when noise_amplitude is 0.
[[nodiscard]] inline std::vector<SimAgent> step(const std::vector<SimAgent>& agents, const SocialForcesParams& params,
                                                double dt, std::mt19937_64* noise_rng = nullptr) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  const std::vector<Vec2> repulsion = repulsion_accelerations(agents, params);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<SimAgent> next = agents;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const SimAgent& a = agents[i];
    SimAgent& out = next[i];
    Vec2 noise{};
    if (params.noise_amplitude > 0.0 && noise_rng != nullptr) {
      // Drawn for every agent so the stream does not depend on arrivals.
      noise.x = params.noise_amplitude * gauss(*noise_rng);
      noise.y = params.noise_amplitude * gauss(*noise_rng);
    }
    if (a.arrived) continue;
    const Vec2 to_goal = a.goal - a.position;
    const double dist = norm(to_goal);
    if (dist <= kArrivalRadius) {
      const double travel = std::min(dist, std::max(norm(a.velocity), 0.5 * a.comfort_speed) * dt);
      if (travel >= dist) {
        out.position = a.goal;
        out.velocity = {};
        out.arrived = true;
      } else {
        const Vec2 dir = to_goal / dist;
        out.position = a.position + travel * dir;
        out.velocity = (travel / dt) * dir;
      }
      continue;
    }
    const Vec2 drive = (a.comfort_speed * (to_goal / dist) - a.velocity) / params.relaxation_time;
    Vec2 v = a.velocity + (drive + repulsion[i] + noise) * dt;
    const double speed = norm(v);
    if (speed > params.max_speed) v *= params.max_speed / speed;
    out.position = a.position + a.velocity * dt;
    out.velocity = v;
  }
  return next;
}

[[nodiscard]] inline std::size_t step_count(double duration, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (!(duration >= dt) || !std::isfinite(duration)) throw InvalidArgument("duration must be at least one timestep");
  const auto steps = static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
  if (steps < 2) throw InvalidArgument("duration must cover at least 2 timesteps");
  return steps;
}

/// Runs the model from given initial agents for `steps` recorded states.
[[nodiscard]] inline CrowdTrajectory simulate_agents(std::vector<SimAgent> agents, const SocialForcesParams& params,
                                                     std::size_t steps, double dt, std::uint64_t noise_seed) {
  validate(params);
  std::mt19937_64 noise_rng(noise_seed);
  std::vector<AgentTrack> tracks(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const SimAgent& a = agents[i];
    tracks[i].statics = AgentStatics{a.id, a.body_radius, a.personal_radius};
    tracks[i].goal = a.goal;
    tracks[i].comfort_speed = a.comfort_speed;
    tracks[i].positions.reserve(steps);
    tracks[i].positions.push_back(a.position);
  }
  for (std::size_t t = 1; t < steps; ++t) {
    agents = step(agents, params, dt, &noise_rng);
    for (std::size_t i = 0; i < agents.size(); ++i) tracks[i].positions.push_back(agents[i].position);
  }
  return derive_kinematics(tracks, dt);
}

/// ceil(duration / dt) states per agent, deterministic in the scenario seed.
[[nodiscard]] inline CrowdTrajectory simulate(const Scenario& scenario, const SocialForcesParams& params, double duration,
                                              double dt = kCanonicalDt) {
  const std::size_t steps = step_count(duration, dt);
  validate(params);
  return simulate_agents(make_scenario(scenario), params, steps, dt, split_seed(scenario.seed, 3));
}

[[nodiscard]] inline std::string params_to_text(const SocialForcesParams& p) {
  std::ostringstream out;
  out << "relaxation_time = " << text::format_double(p.relaxation_time) << '\n';
  out << "repulsion_strength = " << text::format_double(p.repulsion_strength) << '\n';
  out << "repulsion_range = " << text::format_double(p.repulsion_range) << '\n';
  out << "max_speed = " << text::format_double(p.max_speed) << '\n';
  out << "noise_amplitude = " << text::format_double(p.noise_amplitude) << '\n';
  return out.str();
}

/// Keys absent from the file keep their defaults; unknown keys are rejected.
[[nodiscard]] inline SocialForcesParams parse_params(std::istream& in) {
  SocialForcesParams p;
  for (const auto& [key, value] : text::parse_key_values(in)) {
    const double v = text::require_double(key, value);
    if (key == "relaxation_time") p.relaxation_time = v;
    else if (key == "repulsion_strength") p.repulsion_strength = v;
    else if (key == "repulsion_range") p.repulsion_range = v;
    else if (key == "max_speed") p.max_speed = v;
    else if (key == "noise_amplitude") p.noise_amplitude = v;
    else throw MalformedInput("unknown key '" + key + "'");
  }
  validate(p);
  return p;
}

[[nodiscard]] inline SocialForcesParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open parameter file " + path);
  return parse_params(in);
}

}  // namespace crowdqf
