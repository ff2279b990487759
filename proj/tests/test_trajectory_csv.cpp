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


#include <sstream>

#include <gtest/gtest.h>

#include "crowdqf/trajectory_csv.hpp"
#include "support.hpp"

namespace crowdqf {
namespace {

CrowdTrajectory read(const std::string& s) {
  std::istringstream in(s);
  return read_trajectory_csv(in);
}

TEST(TrajectoryCsv, MinimalColumnsUseDefaults) {
  const CrowdTrajectory c = read(
      "agent_id,t,x,y\n"
      "3,0,0,0\n3,0.1,0.1,0\n3,0.2,0.3,0\n"
      "5,0,1,1\n5,0.1,1,1.2\n5,0.2,1,1.4\n");
  ASSERT_EQ(c.num_agents(), 2u);
  ASSERT_EQ(c.num_steps(), 3u);
  EXPECT_DOUBLE_EQ(c.dt, 0.1);
  EXPECT_EQ(c.characters[0].statics.agent_id, 3);
  EXPECT_EQ(c.characters[0].individuals.goal, (Vec2{0.3, 0.0}));
  EXPECT_NEAR(c.characters[1].individuals.comfort_speed, 2.0, 1e-9);
  EXPECT_EQ(c.characters[1].statics.personal_radius, kDefaultPersonalRadius);
}

TEST(TrajectoryCsv, OptionalColumns) {
  const CrowdTrajectory c = read(
      "agent_id,t,x,y,goal_x,goal_y,comfort_speed,radius\n"
      "1,0,0,0,5,0,1.3,0.25\n1,0.5,0.5,0,5,0,1.3,0.25\n");
  EXPECT_DOUBLE_EQ(c.dt, 0.5);
  EXPECT_EQ(c.characters[0].individuals.goal, (Vec2{5.0, 0.0}));
  EXPECT_EQ(c.characters[0].individuals.comfort_speed, 1.3);
  EXPECT_EQ(c.characters[0].statics.body_radius, 0.25);
  EXPECT_EQ(c.characters[0].statics.personal_radius, kDefaultPersonalRadius);
}

TEST(TrajectoryCsv, Rejections) {
  EXPECT_THROW(read(""), MalformedInput);
  EXPECT_THROW(read("id,t,x,y\n1,0,0,0\n1,1,0,0\n"), MalformedInput);
  EXPECT_THROW(read("agent_id,t,x,y\n1,0,0,0\n"), MalformedInput);
  EXPECT_THROW(read("agent_id,t,x,y\n2,0,0,0\n2,1,0,0\n1,0,0,0\n1,1,0,0\n"), MalformedInput);
  EXPECT_THROW(read("agent_id,t,x,y\n1,1,0,0\n1,0,0,0\n"), MalformedInput);
  EXPECT_THROW(read("agent_id,t,x,y\n1,0,0,0\n1,1,0,0\n1,3,0,0\n"), MalformedInput);
  EXPECT_THROW(read("agent_id,t,x,y\n1,0,0,abc\n1,1,0,0\n"), MalformedInput);
  EXPECT_THROW(read("agent_id,t,x,y\n1,0,0,0\n1,1,0,0\n2,0,0,0\n"), MalformedInput);
  EXPECT_THROW(read("agent_id,t,x,y,radius\n1,0,0,0,0.3\n1,1,0,0,0.4\n"), MalformedInput);
}

TEST(TrajectoryCsv, RoundTripIsExact) {
  testing::Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const CrowdTrajectory c = testing::random_crowd(rng, 1 + rng() % 5, 2 + rng() % 40);
    const CrowdTrajectory back = read(trajectory_to_csv(c));
    ASSERT_EQ(back.num_agents(), c.num_agents());
    EXPECT_EQ(positions_of(back), positions_of(c));
    EXPECT_EQ(back.dt, c.dt);
    for (std::size_t n = 0; n < c.num_agents(); ++n) {
      EXPECT_EQ(back.characters[n].individuals.goal, c.characters[n].individuals.goal);
      EXPECT_EQ(back.characters[n].individuals.comfort_speed, c.characters[n].individuals.comfort_speed);
      EXPECT_EQ(back.characters[n].statics.body_radius, c.characters[n].statics.body_radius);
    }
    EXPECT_EQ(trajectory_to_csv(back), trajectory_to_csv(c));
  }
}

}  // namespace
}  // namespace crowdqf
