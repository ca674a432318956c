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

#ifndef MONITORBENCH_LEARNING_HPP_
#define MONITORBENCH_LEARNING_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "monitorbench/normalizer.hpp"
#include "monitorbench/policy.hpp"

namespace mb {

// Aligned per-agent arrays over the event steps of one episode.
struct AgentBatch {
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<std::uint8_t> active;  // 1 at the agent's ready steps
  std::vector<double> dts;
  bool terminal = true;
  double final_value = 0.0;  // bootstrap when not terminal
  double gamma = 0.99;
  double lambda = 0.95;
};

struct RolloutBatch {
  std::vector<AgentBatch> agents;
};

struct GaeResult {
  std::vector<double> advantages;  // 0 at inactive steps
  std::vector<double> returns;     // advantages + values at active steps
};

// Folded multi-step TD errors: inactive steps between two active steps are
// folded into the earlier active step's delta with accumulated discount.
GaeResult TransGae(const AgentBatch& batch);

// G_n = r_n + gamma * G_{n+1}, G_N = 0.
std::vector<double> DiscountedReturns(const std::vector<double>& rewards,
                                      double gamma);

struct DemoTuple {
  int episode = 0;
  int step = 0;
  int agent = 0;
  std::vector<double> observation;
  std::string state;  // compact pose/latency snapshot
  int action_index = 0;
  std::vector<std::uint8_t> mask;
  double reward = 0.0;
  double raw_return = 0.0;
  double normalized_return = 0.0;
};

struct DemoDataset {
  double gamma = 0.99;
  double mean_return = 0.0;
  double std_return = 0.0;
  double eps = RunningNormalizer::kEps;
  std::vector<DemoTuple> tuples;
};

// Algorithm-style demonstration sampling: seeded episodes of `policy`,
// per-agent counterfactual rewards, discounted MC returns from the episode
// end, normalized with the global statistics over active steps.
DemoDataset BuildDemoDataset(const MonitorGraph& g, const MdpConfig& cfg,
                             const Policy& policy,
                             const std::vector<RobotPose>& p0, int episodes,
                             const Rational& horizon, double gamma,
                             std::uint64_t seed);

void WriteDemoDataset(const DemoDataset& dataset, std::ostream& out);

struct QConfig {
  double gamma = 0.9;  // per unit of physical time
  double alpha = 0.2;
  double eps_start = 1.0;
  double eps_end = 0.05;
  std::int64_t budget = 100000;
  std::int64_t episode_events = 512;
  std::size_t max_keys = 2000000;
};

// Q over abstracted keys (poses plus bucketed latencies/tracker); values
// indexed by the joint action enumeration of the state's ready robots.
using QTable = std::map<std::string, std::vector<double>>;

struct QLearnResult {
  std::shared_ptr<QTable> table;
  std::unique_ptr<Policy> greedy;
  std::int64_t updates = 0;
};

QLearnResult SmdpQLearn(const MonitorGraph& g, const MdpConfig& cfg,
                        const std::vector<RobotPose>& p0, const QConfig& qcfg,
                        std::uint64_t seed);

// Greedy policy over a fixed table; unseen keys fall back to the first
// legal joint action.
std::unique_ptr<Policy> MakeQGreedyPolicy(const MonitorGraph& g,
                                          const MdpConfig& cfg,
                                          std::shared_ptr<QTable> table);

// Enumerates the joint actions of the ready robots in robot-index order.
std::vector<std::vector<AgentAction>> JointActions(const MonitorGraph& g,
                                                   const MdpConfig& cfg,
                                                   const EventState& s);

// Abstraction key used by the tabular learner (exposed for tests).
std::string QStateKey(const MonitorGraph& g, const MdpConfig& cfg,
                      const EventState& s);

}  // namespace mb

#endif  // MONITORBENCH_LEARNING_HPP_
