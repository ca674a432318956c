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

#ifndef MONITORBENCH_ORACLE_HPP_
#define MONITORBENCH_ORACLE_HPP_

#include <cstdint>
#include <optional>

#include "monitorbench/mdp.hpp"

namespace mb {

// plan.robots[r].prefix runs once from `initial`; plan.robots[r].cycle then
// repeats with joint period W after prefix_duration.
struct PeriodicStrategy {
  std::vector<RobotPose> initial;
  SegmentPlan plan;
  Rational prefix_duration = 0;
  Rational period = 0;  // W
};

struct SearchBounds {
  std::optional<Rational> latency_cap;   // weighted-latency prune threshold
  std::optional<Rational> incumbent;     // initial upper bound
  std::int64_t max_depth = 4096;
  std::int64_t max_nodes = 200000000;
};

struct OracleResult {
  Rational j_star = 0;
  bool found = false;
  bool certified = false;
  std::int64_t nodes_expanded = 0;
  PeriodicStrategy strategy;
};

// Exhaustive DFS over joint event decisions from p0; branches close when the
// joint event-state (poses, exact latencies, min(eta, T)) repeats along the
// path, yielding a periodic strategy whose tail value is the running post-T
// supremum at the repeat.
OracleResult ExactOptimum(const MonitorGraph& g, const MdpConfig& cfg,
                          const std::vector<RobotPose>& p0, const Rational& T,
                          const SearchBounds& bounds = {});

// Appends canonical motion steering the positions at beta back to the
// positions at alpha (both event times of the log), declaring [alpha, beta)
// plus the connection the cycle.
PeriodicStrategy CloseAndLoop(const MonitorGraph& g, const EventLog& log,
                              const Rational& alpha, const Rational& beta);

// Exact tail value of a periodic strategy (max over the third simulated
// cycle); nullopt marks +infinity (some node never visited).
std::optional<Rational> EvaluatePeriodic(const MonitorGraph& g,
                                         const PeriodicStrategy& strategy,
                                         const Rational& T);

struct DiscretizationReport {
  Rational j_delta = 0;
  Rational j_ref = 0;
  Rational bound = 0;  // j_ref + 2 * w_max * delta
  Rational slack = 0;
  bool holds = false;
  bool certified = false;
};

// Checks J*(delta) <= J*(delta_ref) + 2 * w_max * delta with tau_max held
// fixed across both searches.
DiscretizationReport VerifyDiscretization(const MonitorGraph& g,
                                          const std::vector<RobotPose>& p0,
                                          const Rational& delta,
                                          const Rational& delta_ref,
                                          int kappa_max, const Rational& T,
                                          const SearchBounds& bounds = {});

}  // namespace mb

#endif  // MONITORBENCH_ORACLE_HPP_
