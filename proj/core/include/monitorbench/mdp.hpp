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

#ifndef MONITORBENCH_MDP_HPP_
#define MONITORBENCH_MDP_HPP_

#include <optional>
#include <vector>

#include "monitorbench/normalizer.hpp"
#include "monitorbench/world.hpp"

namespace mb {

struct MdpConfig {
  // Evaluation start T; nullopt represents +infinity (never activates).
  std::optional<Rational> T = Rational(0);
  Rational delta = Rational(1);
  int kappa_max = 8;
  Rational lambda_L = 1;
  Rational lambda_z = 1;

  Rational tau_max() const { return delta * kappa_max; }
  void Validate() const;
};

struct AgentAction {
  enum Kind { kMove, kWait, kNoop };
  Kind kind = kNoop;
  int target = 0;     // move target node
  int multiples = 0;  // wait duration = multiples * delta, 1..kappa_max

  static AgentAction Move(int target) { return {kMove, target, 0}; }
  static AgentAction Wait(int multiples) { return {kWait, 0, multiples}; }
  static AgentAction Noop() { return {kNoop, 0, 0}; }
  bool operator==(const AgentAction& o) const {
    return kind == o.kind && target == o.target && multiples == o.multiples;
  }
};

struct EventState {
  std::vector<RobotPose> poses;
  std::vector<Rational> latencies;
  Rational z = 0;
  Rational eta = 0;  // saturates at T
  Rational clock = 0;
  std::vector<Rational> arrived_at;  // last time each robot reached its node
};

EventState MdpReset(const MonitorGraph& g, const std::vector<RobotPose>& p0,
                    const MdpConfig& cfg);
EventState MdpReset(const MonitorGraph& g, const std::vector<int>& p0_nodes,
                    const MdpConfig& cfg);

// Ready robots: adjacent moves (neighbor-index order) then waits 1..kappa_max.
// Busy robots: exactly {no-op}.
std::vector<AgentAction> LegalActions(const MonitorGraph& g,
                                      const MdpConfig& cfg,
                                      const EventState& s, int robot);

struct TransitionResult {
  EventState state;
  Rational dt;
  // Poses during (t, t+dt] and the world-level commands, for log assembly.
  std::vector<RobotPose> poses_during;
  std::vector<std::optional<Command>> commands;
};

// Deterministic event transition with event insertion at the horizon T.
// An additional cap (e.g. remaining rollout horizon) may shorten the step.
TransitionResult MdpTransition(const MonitorGraph& g, const MdpConfig& cfg,
                               const EventState& s,
                               const std::vector<AgentAction>& joint,
                               const std::optional<Rational>& dt_cap = std::nullopt);

inline Rational RewardStep(const EventState& s) { return s.z; }
inline Rational RewardTimeNormalized(const EventState& s, const Rational& dt) {
  return s.z * dt;
}

struct MdpStep {
  std::vector<AgentAction> joint;
  Rational dt;
  Rational z_after;
  Rational t_after;
};

struct MdpRollout {
  std::vector<MdpStep> steps;
};

enum class AverageMode { kStep, kTimeNormalized };

// Step mode: (1/N) sum of z at event right ends; time-normalized:
// sum z*dt / sum dt.
Rational AverageRewardEstimate(const MdpRollout& rollout, AverageMode mode);

struct CounterfactualResult {
  Rational r_l = 0;
  Rational r_z = 0;
  Rational combined = 0;
};

// Replays the transition with robot r's visits removed while keeping event
// timing identical (r held stationary for the realized interval, counting no
// visits), then differences latencies and tracker.
CounterfactualResult CounterfactualRewards(const MonitorGraph& g,
                                           const MdpConfig& cfg,
                                           const EventState& s,
                                           const std::vector<AgentAction>& joint,
                                           int robot);

// Busy robots: 0. Ready robots co-located at a node: arrival-order ranks
// starting at 1, ties by robot index.
std::vector<int> RoleLabels(const EventState& s);

struct ObservationNormalizers {
  RunningNormalizer z;
  RunningNormalizer latency;
  RunningNormalizer remaining;

  void Merge(const ObservationNormalizers& o) {
    z.Merge(o.z);
    latency.Merge(o.latency);
    remaining.Merge(o.remaining);
  }
};

// Per-robot feature vectors; update_stats folds the current state into the
// running statistics before applying them.
std::vector<std::vector<double>> Observe(const MonitorGraph& g,
                                         const MdpConfig& cfg,
                                         const EventState& s,
                                         const GpeTable& gpe,
                                         ObservationNormalizers& norms,
                                         bool update_stats = true);

}  // namespace mb

#endif  // MONITORBENCH_MDP_HPP_
