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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crowdqf/core.hpp"
#include "crowdqf/feature_id.hpp"
#include "crowdqf/features.hpp"
#include "crowdqf/fundamental_diagram.hpp"

namespace crowdqf {

/// Floor applied to fitted standard deviations (feature units).
inline constexpr double kSigmaFloor = 1e-3;

struct FeatureStat {
  double mu{0.0};
  double sigma{1.0};
  std::size_t sample_count{0};
};

/// Normal fit of every feature on reference data, plus the reference
/// fundamental diagram.
struct ReferenceStats {
  std::array<FeatureStat, kFeatureCount> features{};
  FundamentalDiagram curve;

  [[nodiscard]] const FeatureStat& operator[](FeatureId id) const noexcept { return features[index_of(id)]; }
  [[nodiscard]] FeatureStat& operator[](FeatureId id) noexcept { return features[index_of(id)]; }
};

/// Non-negative feature weights with sum <= 1.
class WeightVector {
 public:
  WeightVector() = default;

  /// Throws InvalidArgument on negative or non-finite entries; rescales to
  /// unit sum when the sum exceeds 1.
  explicit WeightVector(const std::array<double, kFeatureCount>& omega) : omega_(omega) {
    double sum = 0.0;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      if (!(omega_[i] >= 0.0) || !std::isfinite(omega_[i])) {
        throw InvalidArgument("weight for " + std::string(kFeatureCodes[i]) + " must be finite and non-negative");
      }
      sum += omega_[i];
    }
    if (sum > 1.0) {
      for (double& w : omega_) w /= sum;
    }
  }

  [[nodiscard]] double operator[](FeatureId id) const noexcept { return omega_[index_of(id)]; }
  [[nodiscard]] const std::array<double, kFeatureCount>& values() const noexcept { return omega_; }

  [[nodiscard]] double sum() const noexcept {
    double s = 0.0;
    for (double w : omega_) s += w;
    return s;
  }

  /// Published pretrained weights, verbatim.
  static WeightVector pretrained() {
    std::array<double, kFeatureCount> w{};
    const auto set = [&w](FeatureId id, double v) { w[index_of(id)] = v; };
    set(FeatureId::kAWS, 0.1995);
    set(FeatureId::kDCS, 0.0258);
    set(FeatureId::kFDR, 0.0590);
    set(FeatureId::kDGD, 0.0072);
    set(FeatureId::kGLR, 0.0074);
    set(FeatureId::kFSP, 0.1054);
    set(FeatureId::kINE, 0.0275);
    set(FeatureId::kAVL, 0.0800);
    set(FeatureId::kLDN, 0.0381);
    set(FeatureId::kDTA, 0.0586);
    set(FeatureId::kEDN, 0.0087);
    set(FeatureId::kIST, 0.0163);
    set(FeatureId::kTTC, 0.0441);
    set(FeatureId::kCOL, 0.0949);
    set(FeatureId::kIAN, 0.0085);
    set(FeatureId::kTCA, 0.0698);
    set(FeatureId::kDCA, 0.0068);
    set(FeatureId::kOVP, 0.0096);
    set(FeatureId::kFDG, 0.0515);
    set(FeatureId::kLEN, 0.0587);
    set(FeatureId::kVAR, 0.0224);
    return WeightVector(w);
  }

 private:
  std::array<double, kFeatureCount> omega_{};
};

using CostVector = std::array<double, kFeatureCount>;

struct QualityScore {
  double total{1.0};
  CostVector cost{};
  CostVector contribution{};
};

/// Gaussian penalty of one value against the reference normal.
[[nodiscard]] inline double gaussian_penalty(double value, const FeatureStat& stat) noexcept {
  const double z = (value - stat.mu) / stat.sigma;
  return 1.0 - std::exp(-0.5 * z * z);
}

/// Mean Gaussian penalty over the samples; in [0, 1).
[[nodiscard]] inline double cost(const FeatureSamples& samples, const FeatureStat& stat) {
  if (samples.empty()) throw InvalidArgument("cost of empty samples for " + std::string(code_of(samples.id)));
  double sum = 0.0;
  for (double v : samples.values) sum += gaussian_penalty(v, stat);
  return sum / static_cast<double>(samples.size());
}

[[nodiscard]] inline double cost(const FeatureSamples& samples, const ReferenceStats& stats) {
  return cost(samples, stats[samples.id]);
}

/// All 21 costs. FDG is re-measured against the reference curve from the
/// AWS and LDN samples, since its stored samples may use another curve.
[[nodiscard]] inline CostVector costs(const FeatureMap& features, const ReferenceStats& stats) {
  if (stats.curve.empty()) throw ConfigurationError("reference stats lack a fundamental diagram");
  CostVector out{};
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    const FeatureId id = feature_at(i);
    if (id == FeatureId::kFDG) {
      out[i] = cost(fundamental_diagram_deviation(features[FeatureId::kAWS], features[FeatureId::kLDN], stats.curve),
                    stats[id]);
    } else {
      out[i] = cost(features[id], stats[id]);
    }
  }
  return out;
}

[[nodiscard]] inline QualityScore combine(const CostVector& cost_vector, const WeightVector& weights) noexcept {
  QualityScore score;
  score.cost = cost_vector;
  double weighted = 0.0;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    score.contribution[i] = weights.values()[i] * cost_vector[i];
    weighted += score.contribution[i];
  }
  score.total = 1.0 - weighted;
  return score;
}

[[nodiscard]] inline QualityScore score_features(const FeatureMap& features, const ReferenceStats& stats,
                                                 const WeightVector& weights) {
  return combine(costs(features, stats), weights);
}

struct ScoreOptions {
  FeatureParams features{};
  /// Evaluate only steps [window_start, window_start + window_steps); the
  /// whole trajectory when unset.
  std::optional<std::size_t> window_steps;
  std::size_t window_start{0};
};

[[nodiscard]] inline QualityScore score(const CrowdTrajectory& crowd, const ReferenceStats& stats,
                                        const WeightVector& weights, const ScoreOptions& options = {}) {
  if (stats.curve.empty()) throw ConfigurationError("reference stats lack a fundamental diagram");
  FeatureParams fp = options.features;
  fp.fd_curve = stats.curve;
  if (options.window_steps) {
    return score_features(extract(slice(crowd, options.window_start, *options.window_steps), fp), stats, weights);
  }
  return score_features(extract(crowd, fp), stats, weights);
}

/// Closeness to the reference per feature (1 - cost), in catalog order.
[[nodiscard]] inline std::vector<std::pair<FeatureId, double>> radar(const QualityScore& score) {
  std::vector<std::pair<FeatureId, double>> out;
  out.reserve(kFeatureCount);
  for (std::size_t i = 0; i < kFeatureCount; ++i) out.emplace_back(feature_at(i), 1.0 - score.cost[i]);
  return out;
}

/// Fits mean and population standard deviation (floored at kSigmaFloor) per
/// feature over all golden crowds, and the fundamental diagram from pooled
/// (LDN, AWS) pairs. FDG is re-measured against that pooled curve.
[[nodiscard]] inline ReferenceStats fit_reference(std::span<const FeatureMap> golden,
                                                  double bin_width = kDefaultDensityBinWidth) {
  if (golden.empty()) throw InsufficientData("no golden trajectories to fit reference statistics");
  std::vector<DensitySpeed> pairs;
  for (const FeatureMap& fm : golden) {
    auto p = density_speed_pairs(fm[FeatureId::kAWS], fm[FeatureId::kLDN]);
    pairs.insert(pairs.end(), p.begin(), p.end());
  }
  if (pairs.empty()) throw InsufficientData("not enough samples for feature AWS/LDN");
  ReferenceStats stats;
  stats.curve = FundamentalDiagram::fit(pairs, bin_width);
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    const FeatureId id = feature_at(i);
    double sum = 0.0;
    std::size_t count = 0;
    const auto for_each_value = [&](auto&& fn) {
      for (const FeatureMap& fm : golden) {
        if (id == FeatureId::kFDG) {
          for (double v : fundamental_diagram_deviation(fm[FeatureId::kAWS], fm[FeatureId::kLDN], stats.curve).values) fn(v);
        } else {
          for (double v : fm[id].values) fn(v);
        }
      }
    };
    for_each_value([&](double v) {
      sum += v;
      ++count;
    });
    if (count < 2) {
      throw InsufficientData("not enough samples for feature " + std::string(code_of(id)) + " (need at least 2)");
    }
    const double mu = sum / static_cast<double>(count);
    double sq = 0.0;
    for_each_value([&](double v) { sq += (v - mu) * (v - mu); });
    const double sigma = std::sqrt(sq / static_cast<double>(count));
    stats.features[i] = FeatureStat{mu, std::max(sigma, kSigmaFloor), count};
  }
  return stats;
}

[[nodiscard]] inline ReferenceStats fit_reference(const FeatureMap& golden, double bin_width = kDefaultDensityBinWidth) {
  return fit_reference(std::span<const FeatureMap>(&golden, 1), bin_width);
}

}  // namespace crowdqf
