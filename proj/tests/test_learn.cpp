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

#include <gtest/gtest.h>

#include "crowdqf/learn.hpp"
#include "support.hpp"

namespace crowdqf {
namespace {

CrowdTrajectory circle_crowd(std::uint64_t seed, std::size_t agents = 8) {
  Scenario s;
  s.kind = ScenarioKind::kCircle;
  s.agent_count = agents;
  s.radius = 4.0;
  s.seed = seed;
  return simulate(s, SocialForcesParams{}, 6.0);
}

double feature_mean(const CrowdTrajectory& c, FeatureId id) {
  const auto& v = extract(c)[id].values;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

TEST(TrainingSet, TargetsFollowLabels) {
  testing::Rng rng(71);
  std::vector<CrowdTrajectory> golden;
  for (int i = 0; i < 3; ++i) golden.push_back(testing::random_crowd(rng, 3, 12));
  std::vector<LabeledCrowd> degraded;
  for (int i = 0; i < 5; ++i) degraded.push_back({testing::random_crowd(rng, 3, 12), 0.0});
  const auto set = build_training_set(golden, degraded);
  ASSERT_EQ(set.size(), 8u);
  std::vector<double> targets;
  for (const auto& ex : set) targets.push_back(ex.target);
  EXPECT_EQ(targets, (std::vector<double>{1, 1, 1, 0, 0, 0, 0, 0}));
  for (const auto& ex : set) EXPECT_TRUE(ex.features.complete());

  degraded.resize(1);
  degraded[0].target = 0.2;
  EXPECT_EQ(build_training_set(golden, degraded).back().target, 0.2);
  degraded[0].target = 1.5;
  EXPECT_THROW((void)build_training_set(golden, degraded), InvalidArgument);
  EXPECT_THROW((void)build_training_set({}, degraded), InsufficientData);
}

TEST(Correlations, DetectsDuplicatesAndConstants) {
  testing::Rng rng(72);
  std::vector<TrainingExample> set;
  for (int e = 0; e < 200; ++e) {
    TrainingExample ex;
    const double a = testing::uniform(rng, 0.0, 1.0);
    for (std::size_t i = 0; i < kFeatureCount; ++i) ex.features[feature_at(i)].push(testing::uniform(rng, 0.0, 1.0), -1, -1);
    ex.features[FeatureId::kAWS].values[0] = a;
    ex.features[FeatureId::kDCS].values[0] = 3.0 * a + 1.0;
    ex.features[FeatureId::kVAR].values[0] = 0.7;
    set.push_back(ex);
  }
  const auto corr = check_correlations(set);
  ASSERT_EQ(corr.size(), 210u);
  for (const auto& c : corr) {
    if (c.a == FeatureId::kAWS && c.b == FeatureId::kDCS) {
      EXPECT_NEAR(c.rho, 1.0, 1e-12);
      EXPECT_TRUE(c.flagged);
    } else if (c.a == FeatureId::kVAR || c.b == FeatureId::kVAR) {
      EXPECT_TRUE(c.degenerate);
      EXPECT_FALSE(c.flagged);
    } else {
      EXPECT_LT(std::abs(c.rho), 0.3) << code_of(c.a) << "/" << code_of(c.b);
    }
  }
  EXPECT_THROW((void)check_correlations(std::span<const TrainingExample>(set.data(), 1)), InsufficientData);
}

TEST(DecodeWeights, ClipsAndRescales) {
  std::vector<double> g(kFeatureCount, 0.1);
  const auto w = decode_weights(g);
  double s = 0.0;
  for (double x : w) s += x;
  EXPECT_NEAR(s, 1.0, 1e-12);
  std::vector<double> small(kFeatureCount, 0.01);
  small[0] = -1.0;
  const auto v = decode_weights(small);
  EXPECT_EQ(v[0], 0.0);
  EXPECT_EQ(v[1], 0.01);
}

TEST(WeightFitness, MeanAbsoluteError) {
  CostVector c{};
  c.fill(0.5);
  const std::vector<CostVector> costs{c, CostVector{}};
  const std::vector<double> targets{0.0, 1.0};
  std::array<double, kFeatureCount> w{};
  EXPECT_EQ(weight_fitness(costs, targets, w), 0.5);
  w[0] = 1.0;
  EXPECT_EQ(weight_fitness(costs, targets, w), 0.25);
}

TEST(TrainWeights, SingleGoldenExampleReachesZero) {
  testing::Rng rng(73);
  const CrowdTrajectory c = testing::random_crowd(rng, 4, 20);
  const std::vector<CrowdTrajectory> golden{c};
  const auto set = build_training_set(golden, {});
  const ReferenceStats stats = fit_reference(extract(c));
  GaConfig ga;
  ga.seed = 3;
  ga.max_generations = 50;
  const TrainResult r = train_weights(set, stats, ga, TrainOptions{{WeightVector{}}});
  EXPECT_EQ(r.fitness, 0.0);
  EXPECT_EQ(r.history.size(), 1u);
}

// Only one feature separates good from bad examples; training must find it.
TEST(TrainWeights, FindsPlantedFeature) {
  testing::Rng rng(74);
  std::vector<TrainingExample> set;
  ReferenceStats stats;
  stats.curve = FundamentalDiagram::fit(std::vector<DensitySpeed>{{0.1, 1.3}, {0.6, 1.2}});
  for (auto& f : stats.features) f = FeatureStat{0.0, 1.0, 100};
  const FeatureId planted = FeatureId::kTTC;
  for (int e = 0; e < 30; ++e) {
    const bool good = e < 10;
    TrainingExample ex;
    ex.target = good ? 1.0 : 0.0;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      const FeatureId id = feature_at(i);
      for (int k = 0; k < 20; ++k) {
        double v = testing::uniform(rng, -0.5, 0.5);
        if (id == planted && !good) v = 40.0;
        if (id == FeatureId::kAWS || id == FeatureId::kLDN) v = 1.0;
        ex.features[id].push(v, k, k);
      }
    }
    set.push_back(ex);
  }
  GaConfig ga;
  ga.seed = 5;
  ga.max_generations = 300;
  const TrainResult r = train_weights(set, stats, ga);
  EXPECT_GE(r.weights[planted] / std::max(1e-12, r.weights.sum()), 0.9);
  EXPECT_LT(r.fitness, 0.05);
  for (std::size_t k = 1; k < r.history.size(); ++k) EXPECT_LE(r.history[k], r.history[k - 1]);
}

TEST(TrainWeights, ElitePretrainedIsNeverWorse) {
  std::vector<CrowdTrajectory> golden = testing::golden_crowds(3, 100);
  std::vector<LabeledCrowd> degraded;
  for (std::size_t i = 0; i < golden.size(); ++i) {
    degraded.push_back({degrade(golden[i], DegradeMode::kNoAvoidance, i), 0.0});
  }
  const auto set = build_training_set(golden, degraded);
  const ReferenceStats stats = testing::fit_on(golden);
  std::vector<CostVector> costs;
  std::vector<double> targets;
  for (const auto& ex : set) {
    costs.push_back(crowdqf::costs(ex.features, stats));
    targets.push_back(ex.target);
  }
  const double baseline = weight_fitness(costs, targets, WeightVector::pretrained().values());
  GaConfig ga;
  ga.seed = 6;
  ga.max_generations = 20;
  const TrainResult r = train_weights(set, stats, ga, TrainOptions{{WeightVector::pretrained()}});
  EXPECT_LE(r.fitness, baseline);
  EXPECT_EQ(r.history.front(), std::min(r.history.front(), baseline));
}

TEST(Degrade, NoAvoidanceCollides) {
  const CrowdTrajectory c = circle_crowd(1);
  const CrowdTrajectory d = degrade(c, DegradeMode::kNoAvoidance, 0);
  EXPECT_EQ(d.num_agents(), c.num_agents());
  EXPECT_EQ(d.num_steps(), c.num_steps());
  EXPECT_GT(feature_mean(d, FeatureId::kCOL), 0.0);
  EXPECT_GT(feature_mean(d, FeatureId::kCOL), feature_mean(c, FeatureId::kCOL));
  for (std::size_t n = 0; n < c.num_agents(); ++n) {
    EXPECT_EQ(d.characters[n].states.front().position, c.characters[n].states.front().position);
  }
}

TEST(Degrade, NoAvoidanceRaisesCollisionCost) {
  const std::vector<CrowdTrajectory> golden = testing::golden_crowds(3, 100);
  const ReferenceStats stats = testing::fit_on(golden);
  const CrowdTrajectory held_out = testing::golden_crowds(1, 900).front();
  const QualityScore before = score(held_out, stats, WeightVector::pretrained());
  const QualityScore after = score(degrade(held_out, DegradeMode::kNoAvoidance, 1), stats, WeightVector::pretrained());
  EXPECT_GT(after.cost[index_of(FeatureId::kCOL)], before.cost[index_of(FeatureId::kCOL)]);
  EXPECT_LT(after.total, before.total);
}

TEST(Degrade, ZeroJitterIsIdentity) {
  const CrowdTrajectory c = circle_crowd(2);
  DegradeOptions o;
  o.jitter_amplitude = 0.0;
  const CrowdTrajectory d = degrade(c, DegradeMode::kJitter, 9, o);
  EXPECT_EQ(positions_of(d), positions_of(c));
  o.jitter_amplitude = -1.0;
  EXPECT_THROW((void)degrade(c, DegradeMode::kJitter, 9, o), InvalidArgument);
}

TEST(Degrade, JitterKeepsStepLengths) {
  const CrowdTrajectory c = circle_crowd(3);
  const CrowdTrajectory d = degrade(c, DegradeMode::kJitter, 4);
  const auto a = positions_of(c);
  const auto b = positions_of(d);
  for (std::size_t n = 0; n < a.size(); ++n) {
    for (std::size_t t = 1; t < a[n].size(); ++t) {
      EXPECT_NEAR(norm(b[n][t] - b[n][t - 1]), norm(a[n][t] - a[n][t - 1]), 1e-9);
    }
  }
  EXPECT_NE(b, a);
}

TEST(Degrade, SpeedScaleMultipliesSpeed) {
  const CrowdTrajectory c = circle_crowd(4);
  DegradeOptions o;
  o.speed_factor = 3.0;
  const CrowdTrajectory d = degrade(c, DegradeMode::kSpeedScale, 0, o);
  EXPECT_NEAR(feature_mean(d, FeatureId::kAWS), 3.0 * feature_mean(c, FeatureId::kAWS), 1e-9);
  o.speed_factor = 0.0;
  EXPECT_THROW((void)degrade(c, DegradeMode::kSpeedScale, 0, o), InvalidArgument);
}

TEST(Degrade, FreezeStopsAgents) {
  const CrowdTrajectory c = circle_crowd(5, 10);
  const CrowdTrajectory d = degrade(c, DegradeMode::kFreeze, 8);
  const auto p = positions_of(d);
  std::size_t frozen = 0;
  for (const auto& track : p) {
    if (track[track.size() - 1] == track[track.size() - 2] && track[3 * track.size() / 4] == track.back()) ++frozen;
  }
  EXPECT_GE(frozen, 3u);
  DegradeOptions o;
  o.freeze_fraction = 2.0;
  EXPECT_THROW((void)degrade(c, DegradeMode::kFreeze, 0, o), InvalidArgument);
}

TEST(Degrade, ModeNames) {
  for (DegradeMode m : {DegradeMode::kNoAvoidance, DegradeMode::kJitter, DegradeMode::kSpeedScale, DegradeMode::kFreeze}) {
    EXPECT_EQ(parse_degrade_mode(to_string(m)), m);
  }
  EXPECT_THROW((void)parse_degrade_mode("teleport"), InvalidArgument);
}

}  // namespace
}  // namespace crowdqf
