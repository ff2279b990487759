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


#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "crowdqf/qf_io.hpp"
#include "support.hpp"

namespace crowdqf {
namespace {

ReferenceStats parse(const std::string& s) {
  std::istringstream in(s);
  return parse_stats(in);
}

WeightVector parse_w(const std::string& s) {
  std::istringstream in(s);
  return parse_weights(in);
}

TEST(QfIo, StatsRoundTrip) {
  testing::Rng rng(61);
  const ReferenceStats stats = fit_reference(extract(testing::random_crowd(rng, 6, 30)));
  const std::string text = stats_to_text(stats);
  const ReferenceStats back = parse(text);
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    EXPECT_EQ(back.features[i].mu, stats.features[i].mu);
    EXPECT_EQ(back.features[i].sigma, stats.features[i].sigma);
    EXPECT_EQ(back.features[i].sample_count, stats.features[i].sample_count);
  }
  EXPECT_EQ(back.curve.bins(), stats.curve.bins());
  EXPECT_EQ(stats_to_text(back), text);
}

TEST(QfIo, WeightsRoundTrip) {
  const WeightVector w = WeightVector::pretrained();
  EXPECT_EQ(parse_w(weights_to_text(w)).values(), w.values());
}

TEST(QfIo, Rejections) {
  testing::Rng rng(62);
  const std::string good = stats_to_text(fit_reference(extract(testing::random_crowd(rng, 4, 20))));
  EXPECT_THROW(parse(good + "XYZ.mu = 1\n"), MalformedInput);
  EXPECT_THROW(parse(good + "AWS.median = 1\n"), MalformedInput);
  EXPECT_THROW(parse(good + "AWS.mu = 2\n"), MalformedInput);  // duplicate
  EXPECT_THROW(parse("AWS.mu = 1\nAWS.sigma = 1\n"), ConfigurationError);
  std::string bad_sigma = good;
  bad_sigma.replace(bad_sigma.find("AWS.sigma = "), std::string("AWS.sigma = ").size(), "AWS.sigma = -");
  EXPECT_THROW(parse(bad_sigma), ConfigurationError);
  EXPECT_THROW(parse_w("AWS.omega = 0.5\n"), ConfigurationError);
  EXPECT_THROW(parse_w("AWS.omega = abc\n"), MalformedInput);
}

TEST(QfIo, BinWidthDefaults) {
  testing::Rng rng(63);
  std::string text = stats_to_text(fit_reference(extract(testing::random_crowd(rng, 4, 20))));
  const auto at = text.find("FDG.bin_width");
  text.erase(at, text.find('\n', at) - at + 1);
  EXPECT_EQ(parse(text).curve.bin_width(), kDefaultDensityBinWidth);
}

TEST(QfIo, ShippedWeightFile) {
  const WeightVector w = load_weights(std::string(CROWDQF_DATA_DIR) + "/pretrained_weights.txt");
  EXPECT_EQ(w.values(), WeightVector::pretrained().values());
  EXPECT_NEAR(w.sum(), 0.9998, 1e-4);
}

}  // namespace
}  // namespace crowdqf
