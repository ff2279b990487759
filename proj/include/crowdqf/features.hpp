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
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "crowdqf/core.hpp"
#include "crowdqf/feature_id.hpp"
#include "crowdqf/fundamental_diagram.hpp"
#include "crowdqf/geometry.hpp"

namespace crowdqf {

struct FeatureParams {
  double interaction_horizon{30.0};    // m; farther neighbours are ignored
  double ttc_horizon{kDefaultTtcHorizon};  // s
  double interaction_tau{2.0};         // s; IST = exp(-TTC / tau)
  double local_density_radius{2.0};    // m
  std::size_t flicker_window{10};      // steps
  double heading_flicker_threshold{0.15};  // rad per step
  double speed_flicker_threshold{0.1};     // m/s per step
  double maneuver_turn_rate{0.3};      // rad/s
  double maneuver_acceleration{0.5};   // m/s^2
  double density_margin{1.0};          // m, EDN bounding-box inflation
  double goal_epsilon{1e-3};           // m
  /// Expected speed per local density. When absent, FDG is measured against a
  /// curve fitted from the crowd itself.
  std::optional<FundamentalDiagram> fd_curve;
};

namespace detail {

inline std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Vec2& p : pts) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace detail

/// Area of the smallest enclosing rectangle of `pts`, each side pushed out by
/// `margin`. Orientation is free so the value does not depend on the frame.
[[nodiscard]] inline double inflated_bounding_area(std::span<const Vec2> pts, double margin) {
  const std::vector<Vec2> hull = detail::convex_hull({pts.begin(), pts.end()});
  if (hull.empty()) return 4.0 * margin * margin;
  if (hull.size() == 1) return 4.0 * margin * margin;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec2 u = normalized(hull[(i + 1) % hull.size()] - hull[i]);
    if (squared_norm(u) == 0.0) continue;
    const Vec2 w{-u.y, u.x};
    double lo_u = std::numeric_limits<double>::infinity(), hi_u = -lo_u;
    double lo_w = lo_u, hi_w = -lo_u;
    for (const Vec2& p : hull) {
      lo_u = std::min(lo_u, dot(p, u));
      hi_u = std::max(hi_u, dot(p, u));
      lo_w = std::min(lo_w, dot(p, w));
      hi_w = std::max(hi_w, dot(p, w));
    }
    best = std::min(best, (hi_u - lo_u + 2.0 * margin) * (hi_w - lo_w + 2.0 * margin));
  }
  return best;
}

/// Per-step mean of (walking speed - expected speed at the local density),
/// from tag-aligned AWS and LDN samples.
[[nodiscard]] inline FeatureSamples fundamental_diagram_deviation(const FeatureSamples& aws, const FeatureSamples& ldn,
                                                                  const FundamentalDiagram& curve) {
  if (aws.size() != ldn.size()) throw InvalidArgument("AWS and LDN samples are not aligned");
  long max_step = -1;
  for (long s : aws.steps) max_step = std::max(max_step, s);
  std::vector<double> sum(static_cast<std::size_t>(max_step + 1), 0.0);
  std::vector<std::size_t> count(sum.size(), 0);
  for (std::size_t i = 0; i < aws.size(); ++i) {
    if (aws.steps[i] != ldn.steps[i] || aws.agent_ids[i] != ldn.agent_ids[i]) {
      throw InvalidArgument("AWS and LDN samples are not aligned");
    }
    const auto t = static_cast<std::size_t>(aws.steps[i]);
    sum[t] += aws.values[i] - curve.expected_speed(ldn.values[i]);
    ++count[t];
  }
  FeatureSamples out;
  out.id = FeatureId::kFDG;
  for (std::size_t t = 0; t < sum.size(); ++t) {
    if (count[t] > 0) out.push(sum[t] / static_cast<double>(count[t]), -1, static_cast<long>(t));
  }
  return out;
}

[[nodiscard]] inline std::vector<DensitySpeed> density_speed_pairs(const FeatureSamples& aws, const FeatureSamples& ldn) {
  if (aws.size() != ldn.size()) throw InvalidArgument("AWS and LDN samples are not aligned");
  std::vector<DensitySpeed> pairs(aws.size());
  for (std::size_t i = 0; i < aws.size(); ++i) pairs[i] = {ldn.values[i], aws.values[i]};
  return pairs;
}

namespace detail {

// Row-major N x T grid of per-(agent, step) values.
struct Grid {
  std::size_t agents{0};
  std::size_t steps{0};
  std::vector<double> data;

  Grid(std::size_t n, std::size_t t, double fill = 0.0) : agents(n), steps(t), data(n * t, fill) {}
  double& operator()(std::size_t n, std::size_t t) noexcept { return data[n * steps + t]; }
  double operator()(std::size_t n, std::size_t t) const noexcept { return data[n * steps + t]; }
};

inline FeatureSamples to_samples(FeatureId id, const Grid& g, const CrowdTrajectory& crowd) {
  FeatureSamples s;
  s.id = id;
  s.values.reserve(g.data.size());
  for (std::size_t n = 0; n < g.agents; ++n) {
    for (std::size_t t = 0; t < g.steps; ++t) s.push(g(n, t), crowd.characters[n].statics.agent_id, static_cast<long>(t));
  }
  return s;
}

// Count of sign alternations between consecutive above-threshold changes in
// the trailing window, divided by the window length.
inline void flicker(const std::vector<double>& change, double threshold, std::size_t window, Grid& out, std::size_t n) {
  const std::size_t steps = change.size();
  std::vector<double> prefix(steps + 1, 0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    const bool alt = k >= 2 && std::abs(change[k]) > threshold && std::abs(change[k - 1]) > threshold &&
                     (change[k] > 0.0) != (change[k - 1] > 0.0);
    prefix[k + 1] = prefix[k] + (alt ? 1.0 : 0.0);
  }
  for (std::size_t t = 0; t < steps; ++t) {
    const std::size_t lo = t + 1 >= window ? t + 1 - window : 0;
    out(n, t) = (prefix[t + 1] - prefix[lo]) / static_cast<double>(window);
  }
}

}  // namespace detail

/// Measures all 21 feature value sets of a crowd. Pairwise features reduce
/// over neighbours (min for TTC/DTA, max for OVP/IST/COL) so each yields one
/// sample per agent per step.
[[nodiscard]] inline FeatureMap extract(const CrowdTrajectory& crowd, const FeatureParams& params = {}) {
  const std::size_t agents = crowd.num_agents();
  const std::size_t steps = crowd.num_steps();
  if (agents == 0) throw MalformedInput("crowd has no agents");
  if (steps < 2) throw MalformedInput("feature extraction needs at least 2 timesteps");
  if (params.flicker_window == 0) throw InvalidArgument("flicker window must be positive");
  const double dt = crowd.dt;
  using detail::Grid;

  Grid aws(agents, steps), dcs(agents, steps), dgd(agents, steps), avl(agents, steps), ine(agents, steps);
  Grid fdr(agents, steps), fsp(agents, steps);
  for (std::size_t n = 0; n < agents; ++n) {
    const CharacterTrajectory& ch = crowd.characters[n];
    std::vector<double> turn(steps, 0.0), accel(steps, 0.0);
    for (std::size_t t = 0; t < steps; ++t) {
      const AgentState& s = ch.states[t];
      aws(n, t) = s.speed;
      dcs(n, t) = std::abs(s.speed - ch.individuals.comfort_speed);
      const Vec2 to_goal = ch.individuals.goal - s.position;
      dgd(n, t) = (s.speed < kSpeedEpsilon || norm(to_goal) < params.goal_epsilon) ? 0.0
                                                                                  : unsigned_angle(s.velocity, to_goal);
      if (t > 0) {
        const AgentState& prev = ch.states[t - 1];
        turn[t] = wrap_angle(s.heading - prev.heading);
        accel[t] = s.speed - prev.speed;
        avl(n, t) = std::abs(turn[t]) / dt;
        ine(n, t) = norm(s.velocity - prev.velocity) / dt;
      }
    }
    avl(n, 0) = avl(n, 1);
    ine(n, 0) = ine(n, 1);
    detail::flicker(turn, params.heading_flicker_threshold, params.flicker_window, fdr, n);
    detail::flicker(accel, params.speed_flicker_threshold, params.flicker_window, fsp, n);
  }

  const double horizon = params.interaction_horizon;
  const double ttc_cap = params.ttc_horizon;
  const double ldn_area = std::numbers::pi * params.local_density_radius * params.local_density_radius;
  Grid dta(agents, steps, horizon), ldn(agents, steps), col(agents, steps), ovp(agents, steps);
  Grid ttc(agents, steps, ttc_cap), tca(agents, steps, ttc_cap), dca(agents, steps, -1.0);
  Grid edn(agents, steps), ist(agents, steps);
  Grid best_dca(agents, steps, std::numeric_limits<double>::infinity());
  std::vector<Vec2> positions(agents);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t a = 0; a < agents; ++a) {
      const AgentState& sa = crowd.characters[a].states[t];
      positions[a] = sa.position;
      const AgentStatics& ra = crowd.characters[a].statics;
      for (std::size_t b = a + 1; b < agents; ++b) {
        const AgentState& sb = crowd.characters[b].states[t];
        const AgentStatics& rb = crowd.characters[b].statics;
        const double d = distance(sa.position, sb.position);
        if (d > horizon) continue;
        for (const std::size_t n : {a, b}) {
          dta(n, t) = std::min(dta(n, t), d);
          if (d <= params.local_density_radius) ldn(n, t) += 1.0;
          if (d < ra.body_radius + rb.body_radius) col(n, t) = 1.0;
          ovp(n, t) = std::max(ovp(n, t), ra.personal_radius + rb.personal_radius - d);
        }
        const PairPrediction pred = predict_pair(sa, ra.body_radius, sb, rb.body_radius, ttc_cap);
        for (const std::size_t n : {a, b}) {
          ttc(n, t) = std::min(ttc(n, t), pred.ttc);
          if (pred.tca < ttc_cap && pred.dca < best_dca(n, t)) {
            best_dca(n, t) = pred.dca;
            tca(n, t) = pred.tca;
            dca(n, t) = pred.dca;
          }
        }
      }
    }
    const double lambda = static_cast<double>(agents) / inflated_bounding_area(positions, params.density_margin);
    for (std::size_t n = 0; n < agents; ++n) {
      ldn(n, t) /= ldn_area;
      if (dca(n, t) < 0.0) dca(n, t) = dta(n, t);
      ist(n, t) = std::exp(-ttc(n, t) / params.interaction_tau);
      edn(n, t) = dta(n, t) * 2.0 * std::sqrt(lambda);
    }
  }

  // Anticipation: at each step where a predicted collision first appears, the
  // TTC at which the agent starts to turn or change speed.
  Grid ian(agents, steps);
  for (std::size_t n = 0; n < agents; ++n) {
    const auto& states = crowd.characters[n].states;
    for (std::size_t t = 0; t < steps; ++t) {
      const bool onset = ttc(n, t) < ttc_cap && (t == 0 || ttc(n, t - 1) >= ttc_cap);
      if (!onset) continue;
      for (std::size_t s = t + 1; s < steps; ++s) {
        if (col(n, s) > 0.0 || static_cast<double>(s - t) * dt > tca(n, t)) break;
        const double speed_rate = std::abs(states[s].speed - states[s - 1].speed) / dt;
        if (avl(n, s) > params.maneuver_turn_rate || speed_rate > params.maneuver_acceleration) {
          ian(n, t) = ttc(n, s);
          break;
        }
      }
    }
  }

  FeatureMap out;
  out[FeatureId::kAWS] = detail::to_samples(FeatureId::kAWS, aws, crowd);
  out[FeatureId::kDGD] = detail::to_samples(FeatureId::kDGD, dgd, crowd);
  out[FeatureId::kINE] = detail::to_samples(FeatureId::kINE, ine, crowd);
  out[FeatureId::kFDR] = detail::to_samples(FeatureId::kFDR, fdr, crowd);
  out[FeatureId::kFSP] = detail::to_samples(FeatureId::kFSP, fsp, crowd);
  out[FeatureId::kDCS] = detail::to_samples(FeatureId::kDCS, dcs, crowd);
  out[FeatureId::kAVL] = detail::to_samples(FeatureId::kAVL, avl, crowd);
  out[FeatureId::kEDN] = detail::to_samples(FeatureId::kEDN, edn, crowd);
  out[FeatureId::kCOL] = detail::to_samples(FeatureId::kCOL, col, crowd);
  out[FeatureId::kLDN] = detail::to_samples(FeatureId::kLDN, ldn, crowd);
  out[FeatureId::kDTA] = detail::to_samples(FeatureId::kDTA, dta, crowd);
  out[FeatureId::kTTC] = detail::to_samples(FeatureId::kTTC, ttc, crowd);
  out[FeatureId::kIST] = detail::to_samples(FeatureId::kIST, ist, crowd);
  out[FeatureId::kTCA] = detail::to_samples(FeatureId::kTCA, tca, crowd);
  out[FeatureId::kOVP] = detail::to_samples(FeatureId::kOVP, ovp, crowd);
  out[FeatureId::kIAN] = detail::to_samples(FeatureId::kIAN, ian, crowd);
  out[FeatureId::kDCA] = detail::to_samples(FeatureId::kDCA, dca, crowd);

  auto& glr = out[FeatureId::kGLR];
  auto& len = out[FeatureId::kLEN];
  for (const CharacterTrajectory& ch : crowd.characters) {
    const Vec2& start = ch.states.front().position;
    const double d_initial = distance(start, ch.individuals.goal);
    const double d_final = distance(ch.states.back().position, ch.individuals.goal);
    glr.push(d_initial < params.goal_epsilon ? 1.0 : std::max(0.0, 1.0 - d_final / d_initial), ch.statics.agent_id, -1);
    double path = 0.0;
    for (std::size_t t = 1; t < ch.states.size(); ++t) path += distance(ch.states[t - 1].position, ch.states[t].position);
    len.push(path / std::max(params.goal_epsilon, d_initial), ch.statics.agent_id, -1);
  }

  const FundamentalDiagram curve =
      params.fd_curve ? *params.fd_curve
                      : FundamentalDiagram::fit(density_speed_pairs(out[FeatureId::kAWS], out[FeatureId::kLDN]));
  out[FeatureId::kFDG] = fundamental_diagram_deviation(out[FeatureId::kAWS], out[FeatureId::kLDN], curve);

  auto& var = out[FeatureId::kVAR];
  for (std::size_t t = 0; t < steps; ++t) {
    double mean = 0.0;
    for (std::size_t n = 0; n < agents; ++n) mean += aws(n, t);
    mean /= static_cast<double>(agents);
    double sq = 0.0;
    for (std::size_t n = 0; n < agents; ++n) sq += (aws(n, t) - mean) * (aws(n, t) - mean);
    const double sd = std::sqrt(sq / static_cast<double>(agents));
    var.push(mean < kSpeedEpsilon ? 0.0 : sd / mean, -1, static_cast<long>(t));
  }
  return out;
}

}  // namespace crowdqf
