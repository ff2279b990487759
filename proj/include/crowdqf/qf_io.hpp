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
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "crowdqf/qf.hpp"
#include "crowdqf/text.hpp"

// Stats / weights files: one `CODE.mu`, `CODE.sigma`, `CODE.omega` line per
// feature (plus optional `CODE.count`), and `FDG.curve` / `FDG.bin_width`.
// A single file may carry both stats and weights; unknown keys are rejected.

namespace crowdqf {

namespace detail {

enum class QfField { kMu, kSigma, kCount, kOmega, kCurve, kBinWidth };

struct QfKey {
  std::optional<FeatureId> feature;
  QfField field{QfField::kMu};
};

inline QfKey parse_qf_key(const std::string& key) {
  if (key == "FDG.curve") return {std::nullopt, QfField::kCurve};
  if (key == "FDG.bin_width") return {std::nullopt, QfField::kBinWidth};
  const auto dot = key.find('.');
  const auto id = dot == std::string::npos ? std::nullopt : parse_feature_code(std::string_view(key).substr(0, dot));
  if (id) {
    const std::string field = key.substr(dot + 1);
    if (field == "mu") return {id, QfField::kMu};
    if (field == "sigma") return {id, QfField::kSigma};
    if (field == "count") return {id, QfField::kCount};
    if (field == "omega") return {id, QfField::kOmega};
  }
  throw MalformedInput("unknown key '" + key + "'");
}

struct QfFile {
  std::array<std::optional<double>, kFeatureCount> mu, sigma, omega;
  std::array<std::optional<std::size_t>, kFeatureCount> count;
  std::optional<std::string> curve;
  std::optional<double> bin_width;
};

inline QfFile parse_qf_file(const text::KeyValues& kv) {
  QfFile f;
  for (const auto& [key, value] : kv) {
    const QfKey k = parse_qf_key(key);
    if (k.field == QfField::kCurve) {
      f.curve = value;
      continue;
    }
    const double v = text::require_double(key, value);
    const std::size_t i = k.feature ? index_of(*k.feature) : 0;
    switch (k.field) {
      case QfField::kMu: f.mu[i] = v; break;
      case QfField::kSigma: f.sigma[i] = v; break;
      case QfField::kOmega: f.omega[i] = v; break;
      case QfField::kCount:
        if (v < 0.0 || v != std::floor(v)) throw MalformedInput("key '" + key + "': count must be a whole number");
        f.count[i] = static_cast<std::size_t>(v);
        break;
      case QfField::kBinWidth: f.bin_width = v; break;
      case QfField::kCurve: break;
    }
  }
  return f;
}

}  // namespace detail

[[nodiscard]] inline ReferenceStats parse_stats(std::istream& in) {
  const detail::QfFile f = detail::parse_qf_file(text::parse_key_values(in));
  ReferenceStats stats;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    const std::string code(kFeatureCodes[i]);
    if (!f.mu[i] || !f.sigma[i]) throw ConfigurationError("stats file is missing " + code + ".mu or " + code + ".sigma");
    if (!(*f.sigma[i] > 0.0)) throw ConfigurationError(code + ".sigma must be positive");
    stats.features[i] = FeatureStat{*f.mu[i], *f.sigma[i], f.count[i].value_or(0)};
  }
  if (!f.curve) throw ConfigurationError("stats file is missing FDG.curve");
  stats.curve = FundamentalDiagram::decode(*f.curve, f.bin_width.value_or(kDefaultDensityBinWidth));
  return stats;
}

[[nodiscard]] inline WeightVector parse_weights(std::istream& in) {
  const detail::QfFile f = detail::parse_qf_file(text::parse_key_values(in));
  std::array<double, kFeatureCount> omega{};
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (!f.omega[i]) throw ConfigurationError("weights file is missing " + std::string(kFeatureCodes[i]) + ".omega");
    omega[i] = *f.omega[i];
  }
  try {
    return WeightVector(omega);
  } catch (const InvalidArgument& e) {
    throw ConfigurationError(e.what());
  }
}

[[nodiscard]] inline ReferenceStats load_stats(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open stats file " + path);
  return parse_stats(in);
}

[[nodiscard]] inline WeightVector load_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open weights file " + path);
  return parse_weights(in);
}

[[nodiscard]] inline std::string stats_to_text(const ReferenceStats& stats) {
  std::ostringstream out;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    const std::string code(kFeatureCodes[i]);
    out << code << ".mu = " << text::format_double(stats.features[i].mu) << '\n';
    out << code << ".sigma = " << text::format_double(stats.features[i].sigma) << '\n';
    out << code << ".count = " << stats.features[i].sample_count << '\n';
  }
  out << "FDG.bin_width = " << text::format_double(stats.curve.bin_width()) << '\n';
  out << "FDG.curve = " << stats.curve.encode() << '\n';
  return out.str();
}

[[nodiscard]] inline std::string weights_to_text(const WeightVector& weights) {
  std::ostringstream out;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    out << kFeatureCodes[i] << ".omega = " << text::format_double(weights.values()[i]) << '\n';
  }
  return out.str();
}

}  // namespace crowdqf
