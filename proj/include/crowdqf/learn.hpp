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
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crowdqf/core.hpp"
#include "crowdqf/features.hpp"
#include "crowdqf/ga.hpp"
#include "crowdqf/qf.hpp"

namespace crowdqf {

// ---------------------------------------------------------------------------
// Degraded trajectories
// ---------------------------------------------------------------------------

enum class DegradeMode { kNoAvoidance, kJitter, kSpeedScale, kFreeze };

[[nodiscard]] inline std::string to_string(DegradeMode m) {
  switch (m) {
    case DegradeMode::kNoAvoidance: return "no-avoidance";
    case DegradeMode::kJitter: return "jitter";
    case DegradeMode::kSpeedScale: return "speed-scale";
    case DegradeMode::kFreeze: return "freeze";
  }
  return "no-avoidance";
}

[[nodiscard]] inline DegradeMode parse_degrade_mode(const std::string& s) {
  if (s == "no-avoidance") return DegradeMode::kNoAvoidance;
  if (s == "jitter") return DegradeMode::kJitter;
  if (s == "speed-scale") return DegradeMode::kSpeedScale;
  if (s == "freeze") return DegradeMode::kFreeze;
  throw InvalidArgument("unknown degrade mode '" + s + "'");
}

struct DegradeOptions {
  double jitter_amplitude{1.0};  // rad, std-dev of per-step heading noise
  double speed_factor{2.0};
  double freeze_fraction{0.3};   // share of agents that stop
};

/// Re-creates the crowd with one artifact. N, T, dt, starts and goals are kept.
[[nodiscard]] inline CrowdTrajectory degrade(const CrowdTrajectory& crowd, DegradeMode mode, std::uint64_t seed,
                                             const DegradeOptions& options = {}) {
  const std::size_t agents = crowd.num_agents();
  const std::size_t steps = crowd.num_steps();
  auto positions = positions_of(crowd);
  switch (mode) {
    case DegradeMode::kNoAvoidance:
      for (std::size_t n = 0; n < agents; ++n) {
        const auto& ch = crowd.characters[n];
        for (std::size_t t = 1; t < steps; ++t) {
          const Vec2& p = positions[n][t - 1];
          const Vec2 to_goal = ch.individuals.goal - p;
          const double dist = norm(to_goal);
          const double travel = ch.individuals.comfort_speed * crowd.dt;
          positions[n][t] = travel >= dist ? ch.individuals.goal : p + (travel / dist) * to_goal;
        }
      }
      break;
    case DegradeMode::kJitter: {
      if (options.jitter_amplitude == 0.0) return crowd;
      if (!(options.jitter_amplitude > 0.0)) throw InvalidArgument("jitter amplitude must be >= 0");
      for (std::size_t n = 0; n < agents; ++n) {
        std::mt19937_64 rng(split_seed(seed, n));
        std::normal_distribution<double> noise(0.0, options.jitter_amplitude);
        const auto original = positions[n];
        for (std::size_t t = 1; t < steps; ++t) {
          positions[n][t] = positions[n][t - 1] + rotated(original[t] - original[t - 1], noise(rng));
        }
      }
      break;
    }
    case DegradeMode::kSpeedScale: {
      if (!(options.speed_factor > 0.0)) throw InvalidArgument("speed factor must be positive");
      for (auto& track : positions) {
        const auto original = track;
        for (std::size_t t = 1; t < steps; ++t) {
          track[t] = track[t - 1] + options.speed_factor * (original[t] - original[t - 1]);
        }
      }
      break;
    }
    case DegradeMode::kFreeze: {
      if (!(options.freeze_fraction >= 0.0 && options.freeze_fraction <= 1.0)) {
        throw InvalidArgument("freeze fraction must lie in [0, 1]");
      }
      std::mt19937_64 rng(seed);
      std::vector<std::size_t> order(agents);
      for (std::size_t i = 0; i < agents; ++i) order[i] = i;
      std::shuffle(order.begin(), order.end(), rng);
      const auto frozen = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::lround(options.freeze_fraction * static_cast<double>(agents))));
      std::uniform_int_distribution<std::size_t> when(steps / 4, std::max(steps / 4, (3 * steps) / 4));
      for (std::size_t k = 0; k < std::min(frozen, agents); ++k) {
        auto& track = positions[order[k]];
        const std::size_t from = std::min(when(rng), steps - 1);
        std::fill(track.begin() + static_cast<std::ptrdiff_t>(from), track.end(), track[from]);
      }
      break;
    }
  }
  return with_positions(crowd, positions, crowd.dt, crowd.t0);
}

// ---------------------------------------------------------------------------
// Training set
// ---------------------------------------------------------------------------

struct TrainingExample {
  FeatureMap features;
  double target{1.0};
  std::string label;
};

struct LabeledCrowd {
  CrowdTrajectory crowd;
  double target{0.0};
};

/// Golden crowds get target 1; degraded ones keep their given target.
/// Features are extracted once here.
[[nodiscard]] inline std::vector<TrainingExample> build_training_set(std::span<const CrowdTrajectory> golden,
                                                                     std::span<const LabeledCrowd> degraded,
                                                                     const FeatureParams& params = {}) {
  if (golden.empty()) throw InsufficientData("training set needs at least one golden trajectory");
  std::vector<TrainingExample> out;
  out.reserve(golden.size() + degraded.size());
  for (std::size_t i = 0; i < golden.size(); ++i) {
    out.push_back({extract(golden[i], params), 1.0, "golden-" + std::to_string(i)});
  }
  for (std::size_t i = 0; i < degraded.size(); ++i) {
    if (!(degraded[i].target >= 0.0 && degraded[i].target <= 1.0)) {
      throw InvalidArgument("training target must lie in [0, 1]");
    }
    out.push_back({extract(degraded[i].crowd, params), degraded[i].target, "degraded-" + std::to_string(i)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Feature correlation screening
// ---------------------------------------------------------------------------

inline constexpr double kCorrelationWarning = 0.8;

struct FeatureCorrelation {
  FeatureId a{FeatureId::kAWS};
  FeatureId b{FeatureId::kAWS};
  double rho{0.0};
  bool flagged{false};
  bool degenerate{false};  // zero variance in a or b; rho reported as 0
};

/// Pearson correlation of per-example mean feature values for all 210 pairs.
[[nodiscard]] inline std::vector<FeatureCorrelation> check_correlations(std::span<const TrainingExample> examples,
                                                                        double threshold = kCorrelationWarning) {
  if (examples.size() < 2) throw InsufficientData("correlation screening needs at least 2 examples");
  const std::size_t m = examples.size();
  std::vector<std::array<double, kFeatureCount>> means(m);
  for (std::size_t e = 0; e < m; ++e) {
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      const auto& vals = examples[e].features[feature_at(i)].values;
      double s = 0.0;
      for (double v : vals) s += v;
      means[e][i] = vals.empty() ? 0.0 : s / static_cast<double>(vals.size());
    }
  }
  std::array<double, kFeatureCount> centre{}, spread{};
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    for (const auto& row : means) centre[i] += row[i];
    centre[i] /= static_cast<double>(m);
    for (const auto& row : means) spread[i] += (row[i] - centre[i]) * (row[i] - centre[i]);
  }
  std::vector<FeatureCorrelation> out;
  out.reserve(kFeatureCount * (kFeatureCount - 1) / 2);
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    for (std::size_t j = i + 1; j < kFeatureCount; ++j) {
      FeatureCorrelation c{feature_at(i), feature_at(j)};
      // Relative floor so round-off in a constant column counts as constant.
      const auto flat = [&](std::size_t k) {
        return spread[k] <= 1e-24 * std::max(1.0, centre[k] * centre[k]) * static_cast<double>(m);
      };
      if (flat(i) || flat(j)) {
        c.degenerate = true;
      } else {
        double cov = 0.0;
        for (const auto& row : means) cov += (row[i] - centre[i]) * (row[j] - centre[j]);
        c.rho = std::clamp(cov / std::sqrt(spread[i] * spread[j]), -1.0, 1.0);
        c.flagged = std::abs(c.rho) > threshold;
      }
      out.push_back(c);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Weight training
// ---------------------------------------------------------------------------

/// Genome -> weights: negative genes are not produced (bounds [0, 1]);
/// sums above 1 are rescaled to 1.
[[nodiscard]] inline std::array<double, kFeatureCount> decode_weights(std::span<const double> genome) {
  std::array<double, kFeatureCount> w{};
  double sum = 0.0;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    w[i] = std::max(0.0, genome[i]);
    sum += w[i];
  }
  if (sum > 1.0) {
    for (double& v : w) v /= sum;
  }
  return w;
}

/// Mean absolute difference between targets and predicted scores.
[[nodiscard]] inline double weight_fitness(std::span<const CostVector> costs, std::span<const double> targets,
                                           std::span<const double> weights) {
  double err = 0.0;
  for (std::size_t e = 0; e < costs.size(); ++e) {
    double weighted = 0.0;
    for (std::size_t i = 0; i < kFeatureCount; ++i) weighted += weights[i] * costs[e][i];
    err += std::abs(targets[e] - (1.0 - weighted));
  }
  return err / static_cast<double>(costs.size());
}

struct TrainOptions {
  /// Weight vectors placed in the initial population (e.g. the pretrained set).
  std::vector<WeightVector> initial;
};

struct TrainResult {
  WeightVector weights;
  double fitness{0.0};
  std::vector<double> history;
};

[[nodiscard]] inline GaConfig default_weight_ga() { return GaConfig{}; }

[[nodiscard]] inline TrainResult train_weights(std::span<const TrainingExample> examples, const ReferenceStats& stats,
                                               const GaConfig& config = default_weight_ga(),
                                               const TrainOptions& options = {}) {
  if (examples.empty()) throw InsufficientData("no training examples");
  std::vector<CostVector> costs;
  std::vector<double> targets;
  costs.reserve(examples.size());
  for (const TrainingExample& ex : examples) {
    if (!ex.features.complete()) throw InvalidArgument("training example '" + ex.label + "' lacks some features");
    costs.push_back(crowdqf::costs(ex.features, stats));
    targets.push_back(ex.target);
  }
  const std::vector<GeneBounds> bounds(kFeatureCount, GeneBounds{0.0, 1.0});
  GaOptions ga_options;
  for (const WeightVector& w : options.initial) ga_options.initial_population.emplace_back(w.values().begin(), w.values().end());
  const GaResult ga = ga_optimize(
      [&](std::span<const double> genome) {
        const auto w = decode_weights(genome);
        return weight_fitness(costs, targets, w);
      },
      bounds, config, ga_options);
  return TrainResult{WeightVector(decode_weights(ga.best.values)), ga.best_fitness, ga.history};
}

}  // namespace crowdqf
