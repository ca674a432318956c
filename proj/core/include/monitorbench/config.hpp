// Copyright 2026 The monitorbench Authors. All rights reserved.
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

#ifndef MONITORBENCH_CONFIG_HPP_
#define MONITORBENCH_CONFIG_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "monitorbench/learning.hpp"
#include "monitorbench/oracle.hpp"
#include "monitorbench/policy.hpp"

namespace mb {

// Policy selection: tsp_cycle | partition | greedy_latency | random |
// scripted (scripted carries a literal segment plan).
struct PolicySpec {
  std::string name = "tsp_cycle";
  SegmentPlan plan;
};

struct VerifySpec {
  Rational delta_ref = 0;  // 0 = delta / 4
};

// One experiment: instance + policy + MDP parameters + run plumbing. The
// schema is versioned and strict: unknown keys are configuration errors.
struct ExperimentConfig {
  int schema = 1;
  std::string graph_path;
  int k = 1;
  std::vector<RobotPose> p0;  // resolved against the graph's node ids
  PolicySpec policy;
  MdpConfig mdp;
  Rational horizon = 0;
  int repetitions = 1;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  SearchBounds oracle;
  QConfig learn;
  VerifySpec verify;
};

// Parses and schema-validates the JSON config; relative paths inside the
// file resolve against its directory.
ExperimentConfig LoadExperimentConfig(const std::string& path);

MonitorGraph LoadConfigGraph(const ExperimentConfig& cfg);

// Instantiable policy from the spec name; "scripted" is executed via RunPlan
// and rejected here.
std::unique_ptr<Policy> MakePolicy(const MonitorGraph& g,
                                   const ExperimentConfig& cfg);

}  // namespace mb

#endif  // MONITORBENCH_CONFIG_HPP_
