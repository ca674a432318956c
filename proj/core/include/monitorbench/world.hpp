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

#ifndef MONITORBENCH_WORLD_HPP_
#define MONITORBENCH_WORLD_HPP_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "monitorbench/graph.hpp"
#include "monitorbench/rational.hpp"

namespace mb {

// (from, to, remaining): traveling toward `to` with `remaining` time left.
// from == to means stationary (waiting while remaining > 0, ready at 0).
struct RobotPose {
  int from = 0;
  int to = 0;
  Rational remaining = 0;

  static RobotPose At(int node) { return RobotPose{node, node, 0}; }
  bool stationary() const { return from == to; }
  bool ready() const { return remaining == 0; }
  bool operator==(const RobotPose& o) const {
    return from == o.from && to == o.to && remaining == o.remaining;
  }
};

struct WorldState {
  std::vector<RobotPose> poses;
  std::vector<Rational> latencies;  // indexed by node
  Rational clock = 0;
};

struct Command {
  enum Kind { kMove, kWait };
  Kind kind = kMove;
  int target = 0;   // move target node
  Rational wait = 0;  // wait duration, > 0

  static Command Move(int target) { return Command{kMove, target, 0}; }
  static Command Wait(Rational d) { return Command{kWait, 0, std::move(d)}; }
  bool operator==(const Command& o) const {
    return kind == o.kind && target == o.target && wait == o.wait;
  }
};

struct Segment {
  enum Kind { kTraverse, kWait };
  Kind kind = kTraverse;
  int node = 0;     // traverse target
  Rational wait = 0;

  static Segment Traverse(int node) { return Segment{kTraverse, node, 0}; }
  static Segment Wait(Rational d) { return Segment{kWait, 0, std::move(d)}; }
};

// Per-robot segment program: prefix once, then cycle repeated until the
// horizon (empty cycle = idle after the prefix).
struct RobotPlan {
  std::vector<Segment> prefix;
  std::vector<Segment> cycle;
};

struct SegmentPlan {
  std::vector<RobotPlan> robots;
};

struct EventRecord {
  Rational t;                       // event time t_n
  std::vector<RobotPose> poses;     // poses during (t_n, t_n + dt]
  std::vector<Rational> latencies;  // L(t_n), after resets at t_n
  std::vector<std::optional<Command>> action;  // per robot; nullopt = busy/idle
  Rational dt;
};

struct EventLog {
  int num_nodes = 0;
  std::vector<RobotPose> initial_poses;
  std::vector<EventRecord> records;
  Rational end_time = 0;
  std::vector<Rational> final_latencies;  // L(end_time)
  std::vector<RobotPose> final_poses;

  bool operator==(const EventLog& o) const;
};

WorldState WorldReset(const MonitorGraph& g, const std::vector<int>& p0_nodes);
WorldState WorldReset(const MonitorGraph& g, const std::vector<RobotPose>& p0);

struct StepResult {
  Rational dt;
  std::vector<RobotPose> poses_during;  // after commands, before time advance
  std::vector<int> visits;              // nodes visited during (t_n, t_n+dt]
};

// Advances the world to the next event (or to dt_cap if smaller). Each ready
// robot must receive a command unless allow_idle is set, in which case a
// command-less ready robot stays parked at its node.
StepResult WorldStepInPlace(const MonitorGraph& g, WorldState& state,
                            const std::vector<std::optional<Command>>& commands,
                            const std::optional<Rational>& dt_cap = std::nullopt,
                            bool allow_idle = false);

// Strict single-step interface: exactly the ready robots carry commands.
std::pair<WorldState, std::vector<int>> WorldStep(
    const MonitorGraph& g, const WorldState& state,
    const std::vector<std::optional<Command>>& commands);

EventLog RunPlan(const MonitorGraph& g, const std::vector<RobotPose>& p0,
                 const SegmentPlan& plan, const Rational& horizon);

// Re-executes the recorded actions from the log's initial configuration.
EventLog ReplayLog(const MonitorGraph& g, const EventLog& log);

Rational LatencyAt(const MonitorGraph& g, const EventLog& log, int node,
                   const Rational& t);
// M(t) = max_v w(v) * L_v(t).
Rational WorstWeightedLatency(const MonitorGraph& g, const EventLog& log,
                              const Rational& t);
// sup of M over [T, horizon], exact from the piecewise-linear structure.
Rational TailSup(const MonitorGraph& g, const EventLog& log, const Rational& T,
                 const Rational& horizon);

// True if some robot is at `node` at some instant of [alpha, beta].
bool VisitedInWindow(const MonitorGraph& g, const EventLog& log, int node,
                     const Rational& alpha, const Rational& beta);

void WriteEventLog(const MonitorGraph& g, const EventLog& log, std::ostream& out);
EventLog ReadEventLog(const MonitorGraph& g, std::istream& in);

}  // namespace mb

#endif  // MONITORBENCH_WORLD_HPP_
