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

#include "crowdqf/core.hpp"
#include "crowdqf/errors.hpp"
#include "crowdqf/feature_id.hpp"
#include "crowdqf/features.hpp"
#include "crowdqf/fundamental_diagram.hpp"
#include "crowdqf/ga.hpp"
#include "crowdqf/geometry.hpp"
#include "crowdqf/learn.hpp"
#include "crowdqf/qf.hpp"
#include "crowdqf/qf_io.hpp"
#include "crowdqf/sim.hpp"
#include "crowdqf/trajectory_csv.hpp"
#include "crowdqf/tune.hpp"
#include "crowdqf/vec2.hpp"

#define CROWDQF_VERSION "0.1.0"
