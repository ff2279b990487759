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

#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "crowdqf/core.hpp"
#include "crowdqf/text.hpp"

// Trajectory CSV: `agent_id,t,x,y[,goal_x,goal_y,comfort_speed,radius]`,
// rows sorted by (agent_id, t), seconds and metres.

namespace crowdqf {

namespace detail {

struct CsvColumns {
  int goal_x{-1};
  int goal_y{-1};
  int comfort_speed{-1};
  int radius{-1};
  std::size_t count{0};
};

inline CsvColumns parse_csv_header(std::string_view header) {
  const auto names = text::split(header, ',');
  if (names.size() < 4 || text::trim(names[0]) != "agent_id" || text::trim(names[1]) != "t" ||
      text::trim(names[2]) != "x" || text::trim(names[3]) != "y") {
    throw MalformedInput("trajectory CSV header must start with agent_id,t,x,y");
  }
  CsvColumns cols;
  cols.count = names.size();
  for (std::size_t i = 4; i < names.size(); ++i) {
    const auto name = text::trim(names[i]);
    int* slot = nullptr;
    if (name == "goal_x") slot = &cols.goal_x;
    else if (name == "goal_y") slot = &cols.goal_y;
    else if (name == "comfort_speed") slot = &cols.comfort_speed;
    else if (name == "radius") slot = &cols.radius;
    if (slot == nullptr) throw MalformedInput("unknown trajectory column '" + std::string(name) + "'");
    if (*slot >= 0) throw MalformedInput("duplicate trajectory column '" + std::string(name) + "'");
    *slot = static_cast<int>(i);
  }
  if ((cols.goal_x >= 0) != (cols.goal_y >= 0)) throw MalformedInput("goal_x and goal_y must appear together");
  return cols;
}

struct CsvAgent {
  AgentTrack track;
  std::vector<double> times;
};

inline std::optional<double> optional_field(const std::vector<std::string_view>& fields, int col, std::size_t line) {
  if (col < 0) return std::nullopt;
  const auto raw = text::trim(fields[static_cast<std::size_t>(col)]);
  if (raw.empty()) return std::nullopt;
  const auto v = text::parse_double(raw);
  if (!v || !std::isfinite(*v)) throw MalformedInput("line " + std::to_string(line) + ": bad number '" + std::string(raw) + "'");
  return v;
}

inline void merge_constant(std::optional<double>& slot, std::optional<double> value, const char* name, int id) {
  if (!value) return;
  if (slot && *slot != *value) {
    throw MalformedInput(std::string(name) + " changes over time for agent " + std::to_string(id));
  }
  slot = value;
}

}  // namespace detail

/// Parses a trajectory CSV at its native sampling interval.
[[nodiscard]] inline CrowdTrajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw MalformedInput("trajectory CSV is empty");
  const detail::CsvColumns cols = detail::parse_csv_header(line);

  std::vector<detail::CsvAgent> agents;
  std::vector<std::optional<double>> goal_x, goal_y, comfort, radius;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto fields = text::split(line, ',');
    if (fields.size() != cols.count) {
      throw MalformedInput("line " + std::to_string(line_no) + ": expected " + std::to_string(cols.count) + " fields");
    }
    const auto id = text::parse_int(fields[0]);
    const auto t = text::parse_double(fields[1]);
    const auto x = text::parse_double(fields[2]);
    const auto y = text::parse_double(fields[3]);
    if (!id || !t || !x || !y || !std::isfinite(*t)) {
      throw MalformedInput("line " + std::to_string(line_no) + ": bad agent_id/t/x/y");
    }
    if (agents.empty() || agents.back().track.statics.agent_id != *id) {
      if (!agents.empty() && agents.back().track.statics.agent_id > *id) {
        throw MalformedInput("line " + std::to_string(line_no) + ": rows not sorted by agent_id");
      }
      agents.emplace_back();
      agents.back().track.statics.agent_id = static_cast<int>(*id);
      goal_x.emplace_back();
      goal_y.emplace_back();
      comfort.emplace_back();
      radius.emplace_back();
    }
    auto& agent = agents.back();
    if (!agent.times.empty() && !(*t > agent.times.back())) {
      throw MalformedInput("line " + std::to_string(line_no) + ": rows not sorted by t");
    }
    agent.times.push_back(*t);
    agent.track.positions.push_back({*x, *y});
    const int aid = agent.track.statics.agent_id;
    detail::merge_constant(goal_x.back(), detail::optional_field(fields, cols.goal_x, line_no), "goal_x", aid);
    detail::merge_constant(goal_y.back(), detail::optional_field(fields, cols.goal_y, line_no), "goal_y", aid);
    detail::merge_constant(comfort.back(), detail::optional_field(fields, cols.comfort_speed, line_no), "comfort_speed",
                           aid);
    detail::merge_constant(radius.back(), detail::optional_field(fields, cols.radius, line_no), "radius", aid);
  }
  if (agents.empty()) throw MalformedInput("trajectory CSV has no rows");

  const auto& axis = agents.front().times;
  if (axis.size() < 2) throw MalformedInput("trajectory needs at least 2 timesteps");
  const double raw_dt = (axis.back() - axis.front()) / static_cast<double>(axis.size() - 1);
  const double dt = std::round(raw_dt * 1e9) / 1e9;
  if (!(dt > 0.0)) throw MalformedInput("non-increasing time axis");
  constexpr double kTimeTolerance = 1e-6;
  std::vector<AgentTrack> tracks;
  tracks.reserve(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    auto& a = agents[i];
    const int id = a.track.statics.agent_id;
    if (a.times.size() != axis.size()) {
      throw MalformedInput("agent " + std::to_string(id) + " has " + std::to_string(a.times.size()) +
                           " timesteps, expected " + std::to_string(axis.size()));
    }
    for (std::size_t k = 0; k < axis.size(); ++k) {
      const double expected = axis.front() + static_cast<double>(k) * dt;
      if (std::abs(a.times[k] - expected) > kTimeTolerance) {
        throw MalformedInput("agent " + std::to_string(id) + ": time axis is not uniform at step " + std::to_string(k));
      }
    }
    if (goal_x[i] && goal_y[i]) a.track.goal = Vec2{*goal_x[i], *goal_y[i]};
    a.track.comfort_speed = comfort[i];
    if (radius[i]) {
      if (!(*radius[i] > 0.0)) throw MalformedInput("agent " + std::to_string(id) + ": radius must be positive");
      a.track.statics.body_radius = *radius[i];
      a.track.statics.personal_radius = std::max(kDefaultPersonalRadius, *radius[i]);
    }
    if (a.track.comfort_speed && !(*a.track.comfort_speed > 0.0)) {
      throw MalformedInput("agent " + std::to_string(id) + ": comfort_speed must be positive");
    }
    tracks.push_back(std::move(a.track));
  }
  CrowdTrajectory crowd = derive_kinematics(tracks, dt, axis.front());
  if (const auto report = validate(crowd); !report.empty()) throw MalformedInput(report.front().message);
  return crowd;
}

inline void write_trajectory_csv(std::ostream& out, const CrowdTrajectory& crowd) {
  out << "agent_id,t,x,y,goal_x,goal_y,comfort_speed,radius\n";
  for (const CharacterTrajectory& ch : crowd.characters) {
    const std::string tail = text::format_double(ch.individuals.goal.x) + ',' +
                             text::format_double(ch.individuals.goal.y) + ',' +
                             text::format_double(ch.individuals.comfort_speed) + ',' +
                             text::format_double(ch.statics.body_radius);
    for (std::size_t k = 0; k < ch.states.size(); ++k) {
      const double t = crowd.t0 + static_cast<double>(k) * crowd.dt;
      out << ch.statics.agent_id << ',' << text::format_double(t) << ',' << text::format_double(ch.states[k].position.x)
          << ',' << text::format_double(ch.states[k].position.y) << ',' << tail << '\n';
    }
  }
}

[[nodiscard]] inline std::string trajectory_to_csv(const CrowdTrajectory& crowd) {
  std::ostringstream out;
  write_trajectory_csv(out, crowd);
  return out.str();
}

[[nodiscard]] inline CrowdTrajectory load_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open " + path);
  try {
    return read_trajectory_csv(in);
  } catch (const MalformedInput& e) {
    throw MalformedInput(path + ": " + e.what());
  }
}

/// Loads and resamples onto the canonical 0.1 s grid when needed.
[[nodiscard]] inline CrowdTrajectory load_canonical(const std::string& path) {
  CrowdTrajectory crowd = load_trajectory_csv(path);
  if (crowd.dt != kCanonicalDt) crowd = resample(crowd, kCanonicalDt);
  return crowd;
}

inline void save_trajectory_csv(const std::string& path, const CrowdTrajectory& crowd) {
  text::save_text(path, trajectory_to_csv(crowd));
}

}  // namespace crowdqf
