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
#include <cstdlib>
#include <iterator>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crowdqf/errors.hpp"
#include "crowdqf/text.hpp"

namespace crowdqf {

struct DensitySpeed {
  double density{0.0};  // persons / m^2
  double speed{0.0};    // m / s
};

inline constexpr double kDefaultDensityBinWidth = 0.5;

/// Piecewise-constant expected walking speed per density bin
/// [k * bin_width, (k + 1) * bin_width). Empty bins answer with the nearest
/// occupied bin, the lower one on ties.
class FundamentalDiagram {
 public:
  FundamentalDiagram() = default;

  FundamentalDiagram(double bin_width, std::map<long, double> bins) : bin_width_(bin_width), bins_(std::move(bins)) {
    if (!(bin_width_ > 0.0)) throw InvalidArgument("bin width must be positive");
    if (bins_.empty()) throw InvalidArgument("fundamental diagram needs at least one occupied bin");
  }

  static FundamentalDiagram fit(std::span<const DensitySpeed> pairs, double bin_width = kDefaultDensityBinWidth) {
    if (pairs.empty()) throw InvalidArgument("fundamental diagram needs at least one (density, speed) pair");
    if (!(bin_width > 0.0)) throw InvalidArgument("bin width must be positive");
    std::map<long, std::pair<double, std::size_t>> acc;
    for (const DensitySpeed& p : pairs) {
      auto& [sum, count] = acc[bin_index(p.density, bin_width)];
      sum += p.speed;
      ++count;
    }
    std::map<long, double> bins;
    for (const auto& [k, sc] : acc) bins.emplace(k, sc.first / static_cast<double>(sc.second));
    return FundamentalDiagram(bin_width, std::move(bins));
  }

  [[nodiscard]] bool empty() const noexcept { return bins_.empty(); }
  [[nodiscard]] double bin_width() const noexcept { return bin_width_; }
  [[nodiscard]] const std::map<long, double>& bins() const noexcept { return bins_; }

  [[nodiscard]] double expected_speed(double density) const {
    if (bins_.empty()) throw InvalidArgument("empty fundamental diagram");
    const long k = bin_index(density, bin_width_);
    const auto above = bins_.lower_bound(k);
    if (above != bins_.end() && above->first == k) return above->second;
    if (above == bins_.end()) return std::prev(above)->second;
    if (above == bins_.begin()) return above->second;
    const auto below = std::prev(above);
    return (k - below->first) <= (above->first - k) ? below->second : above->second;
  }

  /// `d0:v0,d1:v1,...` with d the lower edge of each occupied bin.
  [[nodiscard]] std::string encode() const {
    std::string out;
    for (const auto& [k, v] : bins_) {
      if (!out.empty()) out += ',';
      out += text::format_double(static_cast<double>(k) * bin_width_) + ':' + text::format_double(v);
    }
    return out;
  }

  static FundamentalDiagram decode(std::string_view encoded, double bin_width) {
    if (!(bin_width > 0.0)) throw MalformedInput("FDG.bin_width must be positive");
    std::map<long, double> bins;
    for (const auto item : text::split(encoded, ',')) {
      const auto parts = text::split(item, ':');
      const auto d = parts.size() == 2 ? text::parse_double(parts[0]) : std::nullopt;
      const auto v = parts.size() == 2 ? text::parse_double(parts[1]) : std::nullopt;
      if (!d || !v) throw MalformedInput("bad FDG.curve entry '" + std::string(item) + "'");
      bins[std::lround(*d / bin_width)] = *v;
    }
    return FundamentalDiagram(bin_width, std::move(bins));
  }

 private:
  static long bin_index(double density, double width) noexcept {
    return static_cast<long>(std::floor(density / width));
  }

  double bin_width_{kDefaultDensityBinWidth};
  std::map<long, double> bins_;
};

}  // namespace crowdqf
