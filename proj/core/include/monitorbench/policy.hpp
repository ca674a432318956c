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

#ifndef MONITORBENCH_POLICY_HPP_
#define MONITORBENCH_POLICY_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "monitorbench/mdp.hpp"

namespace mb {

// Per-rollout decision maker. Decide returns a full joint action (no-op for
// busy robots) and must respect LegalActions.
class PolicyInstance {
 public:
  virtual ~PolicyInstance() = default;
  virtual std::vector<AgentAction> Decide(const MonitorGraph& g,
                                          const MdpConfig& cfg,
                                          const EventState& s) = 0;
};

// Immutable policy; Instantiate yields an independent per-rollout instance
// seeded deterministically.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual std::unique_ptr<PolicyInstance> Instantiate(std::uint64_t seed) const = 0;
};

// Robots follow a shared TSP walk with offsets spaced tour-length/k apart;
// initial rendezvous moves each robot to its anchor walk node along canonical
// shortest paths, waiting on the discretized grid until its departure time.
std::unique_ptr<Policy> MakeTspCyclePolicy(const MonitorGraph& g, int k,
                                           const std::vector<RobotPose>& p0);

// Greedy k-center partition; one robot per cluster runs a per-cluster TSP
// cycle (singleton clusters park their robot).
std::unique_ptr<Policy> MakePartitionPolicy(const MonitorGraph& g, int k,
                                            const std::vector<RobotPose>& p0);

// Each ready robot steps toward argmax_v w(v) * (L_v + d(pos, v)), ties by
// node id; waits only when the graph has a single node.
std::unique_ptr<Policy> MakeGreedyLatencyPolicy(const MonitorGraph& g);

std::unique_ptr<Policy> MakeRandomPolicy();

struct RolloutResult {
  MdpRollout rollout;
  EventLog log;
  EventState final_state;
};

RolloutResult RunRollout(const MonitorGraph& g, const MdpConfig& cfg,
                         PolicyInstance& policy,
                         const std::vector<RobotPose>& p0,
                         const Rational& horizon);

}  // namespace mb

#endif  // MONITORBENCH_POLICY_HPP_
