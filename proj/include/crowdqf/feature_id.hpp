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
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crowdqf/errors.hpp"

namespace crowdqf {

/// The 21 trajectory features, in catalog order. The order fixes every
/// reduction and every output listing.
enum class FeatureId : std::size_t {
  kAWS,  // average walking speed
  kDGD,  // difference to goal direction
  kINE,  // inertia
  kFDR,  // flickering in direction
  kFSP,  // flickering in speed
  kGLR,  // goal reaching
  kDCS,  // difference to comfort speed
  kAVL,  // angular velocity
  kLEN,  // trajectory length
  kEDN,  // environment-based density
  kCOL,  // number of collisions
  kLDN,  // local density
  kDTA,  // distance to other agents
  kTTC,  // time to collision
  kIST,  // interaction strength
  kTCA,  // time to closest approach
  kOVP,  // personal space overlap
  kFDG,  // fundamental diagram
  kIAN,  // interaction anticipation
  kDCA,  // distance at closest approach
  kVAR,  // feature values variety
};

inline constexpr std::size_t kFeatureCount = 21;

enum class Granularity { kPerAgentTime, kPerAgent, kPerTime };

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureCodes = {
    "AWS", "DGD", "INE", "FDR", "FSP", "GLR", "DCS", "AVL", "LEN", "EDN", "COL",
    "LDN", "DTA", "TTC", "IST", "TCA", "OVP", "FDG", "IAN", "DCA", "VAR",
};

[[nodiscard]] constexpr std::size_t index_of(FeatureId id) noexcept { return static_cast<std::size_t>(id); }
[[nodiscard]] constexpr FeatureId feature_at(std::size_t i) noexcept { return static_cast<FeatureId>(i); }
[[nodiscard]] constexpr std::string_view code_of(FeatureId id) noexcept { return kFeatureCodes[index_of(id)]; }

[[nodiscard]] constexpr Granularity granularity_of(FeatureId id) noexcept {
  switch (id) {
    case FeatureId::kGLR:
    case FeatureId::kLEN:
      return Granularity::kPerAgent;
    case FeatureId::kFDG:
    case FeatureId::kVAR:
      return Granularity::kPerTime;
    default:
      return Granularity::kPerAgentTime;
  }
}

[[nodiscard]] inline std::optional<FeatureId> parse_feature_code(std::string_view code) noexcept {
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (kFeatureCodes[i] == code) return feature_at(i);
  }
  return std::nullopt;
}

[[nodiscard]] constexpr std::array<FeatureId, kFeatureCount> all_features() noexcept {
  std::array<FeatureId, kFeatureCount> out{};
  for (std::size_t i = 0; i < kFeatureCount; ++i) out[i] = feature_at(i);
  return out;
}

/// Value set of one feature. Tags hold the agent id and the step index; -1
/// marks a dimension the granularity omits. Ordering is agent-major, then time.
struct FeatureSamples {
  FeatureId id{FeatureId::kAWS};
  std::vector<double> values;
  std::vector<int> agent_ids;
  std::vector<long> steps;

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
  [[nodiscard]] bool empty() const noexcept { return values.empty(); }

  void push(double value, int agent_id, long step) {
    values.push_back(value);
    agent_ids.push_back(agent_id);
    steps.push_back(step);
  }
};

/// One FeatureSamples per feature, indexed by FeatureId.
class FeatureMap {
 public:
  FeatureMap() {
    for (std::size_t i = 0; i < kFeatureCount; ++i) samples_[i].id = feature_at(i);
  }

  [[nodiscard]] FeatureSamples& operator[](FeatureId id) noexcept { return samples_[index_of(id)]; }
  [[nodiscard]] const FeatureSamples& operator[](FeatureId id) const noexcept { return samples_[index_of(id)]; }

  [[nodiscard]] auto begin() const noexcept { return samples_.begin(); }
  [[nodiscard]] auto end() const noexcept { return samples_.end(); }
  [[nodiscard]] auto begin() noexcept { return samples_.begin(); }
  [[nodiscard]] auto end() noexcept { return samples_.end(); }

  /// True when every feature has at least one sample.
  [[nodiscard]] bool complete() const noexcept {
    for (const auto& s : samples_) {
      if (s.empty()) return false;
    }
    return true;
  }

 private:
  std::array<FeatureSamples, kFeatureCount> samples_;
};

}  // namespace crowdqf
