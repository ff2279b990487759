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


#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "crowdqf/qf.hpp"
#include "crowdqf/trajectory_csv.hpp"
#include "support.hpp"

namespace crowdqf {
namespace {

FeatureSamples samples_of(std::vector<double> values, FeatureId id = FeatureId::kAWS) {
  FeatureSamples s;
  s.id = id;
  for (double v : values) s.push(v, -1, -1);
  return s;
}

// Oracle: direct arithmetic on the published table.
constexpr double kPublishedSum = 0.1995 + 0.0072 + 0.0275 + 0.0590 + 0.1054 + 0.0074 + 0.0258 + 0.0800 + 0.0587 +
                                 0.0087 + 0.0949 + 0.0381 + 0.0586 + 0.0441 + 0.0163 + 0.0698 + 0.0096 + 0.0515 +
                                 0.0085 + 0.0068 + 0.0224;

TEST(Cost, AnalyticValues) {
  const FeatureStat st{1.4, 0.2, 100};
  EXPECT_EQ(cost(samples_of({1.4, 1.4, 1.4}), st), 0.0);
  EXPECT_NEAR(cost(samples_of({1.6, 1.6}), st), 1.0 - std::exp(-0.5), 1e-12);
  EXPECT_NEAR(cost(samples_of({1.6, 1.6}), st), 0.393469, 1e-6);
  EXPECT_NEAR(cost(samples_of({1.4, 1.8}), st), (1.0 - std::exp(-2.0)) / 2.0, 1e-12);
  EXPECT_NEAR(cost(samples_of({1.4, 1.8}), st), 0.432332, 1e-6);
  EXPECT_THROW((void)cost(samples_of({}), st), InvalidArgument);
}

TEST(Cost, BelowOne) {
  EXPECT_LT(cost(samples_of({1e6}), FeatureStat{0.0, 1.0, 2}), 1.0 + 1e-15);
  EXPECT_GE(cost(samples_of({1e6}), FeatureStat{0.0, 1.0, 2}), 0.0);
}

TEST(FitReference, NormalDraws) {
  testing::Rng rng(41);
  std::normal_distribution<double> normal(1.4, 0.2);
  std::vector<double> draws(10000);
  for (double& d : draws) d = normal(rng);
  // oracle: direct sample statistics
  const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / 10000.0;
  double sq = 0.0;
  for (double d : draws) sq += (d - mean) * (d - mean);
  const double sd = std::sqrt(sq / 10000.0);

  testing::Rng crowd_rng(42);
  FeatureMap fm = extract(testing::random_crowd(crowd_rng, 3, 10));
  fm[FeatureId::kDCS] = samples_of(draws, FeatureId::kDCS);
  const ReferenceStats stats = fit_reference(fm);
  EXPECT_NEAR(stats[FeatureId::kDCS].mu, mean, 1e-12);
  EXPECT_NEAR(stats[FeatureId::kDCS].sigma, sd, 1e-12);
  EXPECT_NEAR(stats[FeatureId::kDCS].mu, 1.4, 0.02);
  EXPECT_NEAR(stats[FeatureId::kDCS].sigma, 0.2, 0.02);
  EXPECT_EQ(stats[FeatureId::kDCS].sample_count, 10000u);
}

TEST(FitReference, FloorAndPopulationConvention) {
  testing::Rng rng(43);
  FeatureMap fm = extract(testing::random_crowd(rng, 3, 10));
  fm[FeatureId::kDGD] = samples_of({5.0, 5.0, 5.0, 5.0}, FeatureId::kDGD);
  fm[FeatureId::kINE] = samples_of({0.0, 2.0}, FeatureId::kINE);
  const ReferenceStats stats = fit_reference(fm);
  EXPECT_EQ(stats[FeatureId::kDGD].mu, 5.0);
  EXPECT_EQ(stats[FeatureId::kDGD].sigma, kSigmaFloor);
  EXPECT_EQ(stats[FeatureId::kINE].mu, 1.0);
  EXPECT_EQ(stats[FeatureId::kINE].sigma, 1.0);
}

TEST(FitReference, TooFewSamplesNamesFeature) {
  testing::Rng rng(44);
  FeatureMap fm = extract(testing::random_crowd(rng, 3, 10));
  fm[FeatureId::kGLR] = samples_of({0.5}, FeatureId::kGLR);
  try {
    (void)fit_reference(fm);
    FAIL() << "expected InsufficientData";
  } catch (const InsufficientData& e) {
    EXPECT_NE(std::string(e.what()).find("GLR"), std::string::npos);
  }
  EXPECT_THROW((void)fit_reference(std::span<const FeatureMap>{}), InsufficientData);
}

TEST(WeightVector, PublishedWeights) {
  const WeightVector w = WeightVector::pretrained();
  EXPECT_NEAR(w.sum(), 0.9998, 1e-12);
  EXPECT_NEAR(w.sum(), kPublishedSum, 1e-12);
  CostVector ones;
  ones.fill(1.0);
  EXPECT_NEAR(combine(ones, w).total, 0.0002, 1e-12);
  EXPECT_EQ(w[FeatureId::kAWS], 0.1995);
  EXPECT_EQ(w[FeatureId::kVAR], 0.0224);
}

TEST(WeightVector, Invariants) {
  std::array<double, kFeatureCount> w{};
  w.fill(0.1);
  const WeightVector normalized(w);
  EXPECT_NEAR(normalized.sum(), 1.0, 1e-12);
  w[3] = -0.01;
  EXPECT_THROW(WeightVector{w}, InvalidArgument);
  w[3] = std::nan("");
  EXPECT_THROW(WeightVector{w}, InvalidArgument);
}

TEST(Combine, ZeroCostsScoreOne) {
  const QualityScore q = combine(CostVector{}, WeightVector::pretrained());
  EXPECT_EQ(q.total, 1.0);
  for (const auto& [id, v] : radar(q)) EXPECT_EQ(v, 1.0);
}

TEST(Radar, Complement) {
  CostVector c{};
  c[index_of(FeatureId::kAWS)] = 0.39;
  const auto r = radar(combine(c, WeightVector::pretrained()));
  ASSERT_EQ(r.size(), 21u);
  EXPECT_EQ(r[0].first, FeatureId::kAWS);
  EXPECT_NEAR(r[0].second, 0.61, 1e-15);
  EXPECT_EQ(r[20].first, FeatureId::kVAR);
}

TEST(Score, CrowdAtReferenceMeansScoresOne) {
  // a crowd whose every sample sits at the fitted mean: identical straight walkers
  std::vector<std::vector<Vec2>> pos;
  for (int n = 0; n < 3; ++n) {
    std::vector<Vec2> p;
    for (int t = 0; t < 20; ++t) p.push_back({0.1 * t, 40.0 * n});
    pos.push_back(p);
  }
  const CrowdTrajectory c = testing::crowd_from(pos);
  const ReferenceStats stats = fit_reference(extract(c));
  const QualityScore q = score(c, stats, WeightVector::pretrained());
  EXPECT_NEAR(q.total, 1.0, 1e-9);
}

TEST(Score, MissingCurveIsConfigurationError) {
  testing::Rng rng(45);
  const CrowdTrajectory c = testing::random_crowd(rng, 3, 10);
  ReferenceStats stats = fit_reference(extract(c));
  stats.curve = FundamentalDiagram{};
  EXPECT_THROW((void)score(c, stats, WeightVector::pretrained()), ConfigurationError);
}

TEST(Score, WindowMatchesSlice) {
  testing::Rng rng(46);
  const CrowdTrajectory c = testing::random_crowd(rng, 4, 40);
  const ReferenceStats stats = fit_reference(extract(c));
  ScoreOptions opts;
  opts.window_start = 10;
  opts.window_steps = 20;
  EXPECT_EQ(score(c, stats, WeightVector::pretrained(), opts).total,
            score(slice(c, 10, 20), stats, WeightVector::pretrained()).total);
}

TEST(Score, CsvRoundTripIsBitIdentical) {
  testing::Rng rng(47);
  for (int trial = 0; trial < 5; ++trial) {
    CrowdTrajectory c = testing::random_crowd(rng, 2 + rng() % 5, 10 + rng() % 20);
    for (CharacterTrajectory& ch : c.characters) ch.statics.personal_radius = std::max(0.5, ch.statics.body_radius);
    const ReferenceStats stats = fit_reference(extract(testing::random_crowd(rng, 6, 30)));
    std::istringstream in(trajectory_to_csv(c));
    const CrowdTrajectory back = read_trajectory_csv(in);
    EXPECT_EQ(score(c, stats, WeightVector::pretrained()).total, score(back, stats, WeightVector::pretrained()).total);
  }
}

// ---- properties ----

TEST(QfProperty, MonotoneInEachCost) {
  testing::Rng rng(48);
  const WeightVector w = WeightVector::pretrained();
  for (int trial = 0; trial < 200; ++trial) {
    CostVector c;
    for (double& v : c) v = testing::uniform(rng, 0.0, 1.0);
    const double before = combine(c, w).total;
    const std::size_t i = rng() % kFeatureCount;
    c[i] = std::min(1.0, c[i] + testing::uniform(rng, 0.0, 0.5));
    EXPECT_LE(combine(c, w).total, before);
  }
}

TEST(QfProperty, CostPermutationAndAffineInvariance) {
  testing::Rng rng(49);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(1 + rng() % 50);
    for (double& x : v) x = testing::uniform(rng, -3.0, 3.0);
    const FeatureStat st{testing::uniform(rng, -1.0, 1.0), testing::uniform(rng, 0.1, 2.0), 10};
    const double base = cost(samples_of(v), st);
    std::vector<double> shuffled = v;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_NEAR(cost(samples_of(shuffled), st), base, 1e-12);
    const double a = testing::uniform(rng, -4.0, 4.0);
    const double b = testing::uniform(rng, -10.0, 10.0);
    if (std::abs(a) < 0.05) continue;
    std::vector<double> mapped = v;
    for (double& x : mapped) x = a * x + b;
    EXPECT_NEAR(cost(samples_of(mapped), FeatureStat{a * st.mu + b, std::abs(a) * st.sigma, 10}), base, 1e-12);
  }
}

TEST(QfProperty, ScoreInUnitIntervalOnRandomCrowds) {
  testing::Rng rng(50);
  const ReferenceStats stats = fit_reference(extract(testing::random_crowd(rng, 8, 40)));
  for (int trial = 0; trial < 100; ++trial) {
    std::array<double, kFeatureCount> w{};
    for (double& x : w) x = testing::uniform(rng, 0.0, 0.2);
    const WeightVector weights(w);
    const QualityScore q = score(testing::random_crowd(rng, 1 + rng() % 7, 2 + rng() % 30), stats, weights);
    EXPECT_GE(q.total, 0.0);
    EXPECT_LE(q.total, 1.0);
    double contributions = 0.0;
    for (double c : q.contribution) contributions += c;
    EXPECT_NEAR(q.total, 1.0 - contributions, 1e-12);
    for (double c : q.cost) {
      EXPECT_GE(c, 0.0);
      EXPECT_LE(c, 1.0);
    }
  }
}

}  // namespace
}  // namespace crowdqf
