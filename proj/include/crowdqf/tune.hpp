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

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "crowdqf/ga.hpp"
#include "crowdqf/qf.hpp"
#include "crowdqf/sim.hpp"

namespace crowdqf {

/// A parametric crowd model seen by the tuner: a box of genes and a way to
/// simulate a scenario with one gene vector shared by all agents.
struct TunableModel {
  std::vector<GeneBounds> bounds;
  std::function<CrowdTrajectory(const Scenario&, std::span<const double>, double)> simulate;
};

/// Gene order: relaxation_time, repulsion_strength, repulsion_range,
/// max_speed, noise_amplitude.
[[nodiscard]] inline std::vector<GeneBounds> social_forces_bounds() {
  return {{0.05, 5.0}, {0.05, 50.0}, {0.02, 2.0}, {2.0, 5.0}, {0.0, 3.0}};
}

[[nodiscard]] inline SocialForcesParams decode_params(std::span<const double> g) {
  return SocialForcesParams{g[0], g[1], g[2], g[3], g[4]};
}

[[nodiscard]] inline std::vector<double> encode_params(const SocialForcesParams& p) {
  return {p.relaxation_time, p.repulsion_strength, p.repulsion_range, p.max_speed, p.noise_amplitude};
}

[[nodiscard]] inline TunableModel social_forces_model(std::vector<GeneBounds> bounds = social_forces_bounds()) {
  if (bounds.size() != 5) throw ConfigurationError("social-forces model has 5 genes");
  return TunableModel{std::move(bounds), [](const Scenario& s, std::span<const double> g, double duration) {
                        return simulate(s, decode_params(g), duration);
                      }};
}

enum class TuneMode { kSingleScenario, kGeneric };

[[nodiscard]] inline GaConfig default_tune_ga() {
  GaConfig ga;
  ga.population_size = 32;
  ga.max_generations = 150;
  return ga;
}

struct TuneConfig {
  TuneMode mode{TuneMode::kSingleScenario};
  /// Single mode: evaluated as given. Generic mode: templates re-seeded every
  /// generation, identically for all genomes of that generation.
  std::vector<Scenario> scenarios;
  double duration{10.0};
  GaConfig ga{default_tune_ga()};
  double exploration_decay{0.97};
  FeatureParams features{};
};

struct TuneResult {
  std::vector<double> genome;
  SocialForcesParams p_opt;
  /// Best score so far per generation; non-decreasing.
  std::vector<double> best_score_history;
  double final_score{0.0};
  /// Best genome and its score within each generation, for snapshots.
  std::vector<std::vector<double>> generation_best;
  std::vector<double> generation_best_score;
  GaStop stop{GaStop::kMaxGenerations};
};

/// Scenarios faced by every genome at `generation`.
[[nodiscard]] inline std::vector<Scenario> scenarios_for_generation(const TuneConfig& config, std::size_t generation) {
  if (config.mode == TuneMode::kSingleScenario) return config.scenarios;
  std::vector<Scenario> out = config.scenarios;
  for (std::size_t i = 0; i < out.size(); ++i) out[i].seed = split_seed(config.scenarios[i].seed, generation + 1, i);
  return out;
}

/// Mean QF over scenarios; 0 when the simulation blows up.
[[nodiscard]] inline double mean_score(const TunableModel& model, std::span<const double> genome,
                                       std::span<const Scenario> scenarios, double duration,
                                       const ReferenceStats& stats, const WeightVector& weights,
                                       const FeatureParams& features = {}) {
  double total = 0.0;
  for (const Scenario& s : scenarios) {
    double value = 0.0;
    try {
      ScoreOptions opts;
      opts.features = features;
      value = score(model.simulate(s, genome, duration), stats, weights, opts).total;
    } catch (const MalformedInput&) {
      value = 0.0;
    }
    if (!std::isfinite(value)) value = 0.0;
    total += value;
  }
  return total / static_cast<double>(scenarios.size());
}

/// GA search for the gene vector maximizing the mean QF score; the mutation
/// scale shrinks by `exploration_decay` each generation.
[[nodiscard]] inline TuneResult tune_model(const TuneConfig& config, const ReferenceStats& stats,
                                           const WeightVector& weights, const TunableModel& model) {
  if (config.scenarios.empty()) throw ConfigurationError("tuning needs at least one scenario");
  if (!(config.exploration_decay > 0.0 && config.exploration_decay <= 1.0)) {
    throw ConfigurationError("exploration_decay must lie in (0, 1]");
  }
  if (!(config.duration > 0.0)) throw ConfigurationError("duration must be positive");
  for (const Scenario& s : config.scenarios) (void)make_scenario(s);

  GaConfig ga = config.ga;
  ga.mutation_decay = config.exploration_decay;
  TuneResult result;
  GaOptions options;
  options.stationary = config.mode == TuneMode::kSingleScenario;
  options.on_generation = [&result](std::size_t, std::span<const double> genome, double fitness) {
    result.generation_best.emplace_back(genome.begin(), genome.end());
    result.generation_best_score.push_back(1.0 - fitness);
  };
  const GaResult best = ga_optimize(
      [&](std::span<const double> genome, std::size_t generation) {
        const auto scenarios = scenarios_for_generation(config, generation);
        return 1.0 - mean_score(model, genome, scenarios, config.duration, stats, weights, config.features);
      },
      model.bounds, ga, options);
  result.genome = best.best.values;
  result.best_score_history.reserve(best.history.size());
  for (double f : best.history) result.best_score_history.push_back(1.0 - f);
  result.final_score = result.best_score_history.back();
  result.stop = best.stop;
  return result;
}

[[nodiscard]] inline TuneResult tune(const TuneConfig& config, const ReferenceStats& stats, const WeightVector& weights,
                                     const std::vector<GeneBounds>& bounds = social_forces_bounds()) {
  TuneResult r = tune_model(config, stats, weights, social_forces_model(bounds));
  r.p_opt = decode_params(r.genome);
  return r;
}

enum class Quartile { kQ1, kQ2, kQ3, kQ4 };

[[nodiscard]] inline std::string to_string(Quartile q) {
  switch (q) {
    case Quartile::kQ1: return "Q1";
    case Quartile::kQ2: return "Q2";
    case Quartile::kQ3: return "Q3";
    case Quartile::kQ4: return "Q4";
  }
  return "Q1";
}

/// Even split of the observed [0, 0.9) score range.
inline constexpr std::array<double, 3> kDefaultQuartileEdges = {0.225, 0.45, 0.675};

/// Left-closed buckets: [0, e0) -> Q1, [e0, e1) -> Q2, [e1, e2) -> Q3, rest Q4.
[[nodiscard]] inline Quartile quartile(double score, const std::array<double, 3>& edges = kDefaultQuartileEdges) {
  if (!(score >= 0.0 && score <= 1.0)) throw InvalidArgument("score must lie in [0, 1]");
  if (!(edges[0] >= 0.0 && edges[0] < edges[1] && edges[1] < edges[2] && edges[2] <= 1.0)) {
    throw InvalidArgument("quartile edges must be strictly increasing within [0, 1]");
  }
  if (score < edges[0]) return Quartile::kQ1;
  if (score < edges[1]) return Quartile::kQ2;
  if (score < edges[2]) return Quartile::kQ3;
  return Quartile::kQ4;
}

}  // namespace crowdqf
