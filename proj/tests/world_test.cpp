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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <sstream>

#include "monitorbench/metrics.hpp"
#include "monitorbench/world.hpp"
#include "test_util.hpp"

using mb::Rational;

namespace {

mb::EventLog RunExample(const mb::MonitorGraph& g, const mbtest::ExamplePlan& ex,
                        const Rational& horizon) {
  return mb::RunPlan(g, ex.p0, ex.plan, horizon);
}

// Random closed-walk plan: each robot gets a random command stream starting
// from the pose recorded in p0_out.
mb::SegmentPlan RandomPlan(std::mt19937_64& rng, const mb::MonitorGraph& g,
                           int k, int segments,
                           std::vector<mb::RobotPose>& p0_out) {
  mb::SegmentPlan plan;
  plan.robots.resize(k);
  p0_out.clear();
  std::vector<int> at(k, 0);
  for (int r = 0; r < k; ++r) {
    at[r] = static_cast<int>(rng() % g.num_nodes());
    p0_out.push_back(mb::RobotPose::At(at[r]));
    for (int s = 0; s < segments; ++s) {
      if (rng() % 4 == 0) {
        plan.robots[r].prefix.push_back(
            mb::Segment::Wait(Rational(1 + static_cast<int>(rng() % 3), 2)));
      } else {
        const auto& nbrs = g.neighbors(at[r]);
        const int next = nbrs[rng() % nbrs.size()];
        plan.robots[r].prefix.push_back(mb::Segment::Traverse(next));
        at[r] = next;
      }
    }
  }
  return plan;
}

}  // namespace

TEST_CASE("example strategies reproduce the reference tail values") {
  mb::MonitorGraph g = mbtest::LoadInstance("long_edge.json");
  const Rational H(30);

  mb::EventLog s1 = RunExample(g, mbtest::Sigma1(g), H);
  CHECK(mb::TailSup(g, s1, 0, H) == Rational(3, 2));

  mb::EventLog s2 = RunExample(g, mbtest::Sigma2(g), H);
  CHECK(mb::Wi(g, s2, H) == Rational(5));
  CHECK(mb::TailSup(g, s2, 5, H) == Rational(3, 2));

  mb::EventLog s3 = RunExample(g, mbtest::Sigma3(g), H);
  CHECK(mb::Wi(g, s3, H) == Rational(5));
  CHECK(mb::TailSup(g, s3, 5, H) == Rational(2));
}

TEST_CASE("sigma1 latency trace around the first arrival") {
  mb::MonitorGraph g = mbtest::LoadInstance("long_edge.json");
  mb::EventLog log = RunExample(g, mbtest::Sigma1(g), 10);
  const int n2 = g.node_index("2");
  // The mid-edge robot reaches node 2 at t = 1/2; arrivals reset at the
  // endpoint, so the latency just before is 2/5 and 0 at the arrival.
  CHECK(mb::LatencyAt(g, log, n2, Rational(2, 5)) == Rational(2, 5));
  CHECK(mb::LatencyAt(g, log, n2, Rational(1, 2)) == Rational(0));
}

TEST_CASE("latencies start at zero when robots cover their start nodes") {
  mb::MonitorGraph g = mbtest::LoadInstance("long_edge.json");
  mbtest::ExamplePlan ex = mbtest::Sigma2(g);
  mb::WorldState s = mb::WorldReset(g, ex.p0);
  for (const auto& l : s.latencies) CHECK(l == Rational(0));
}

TEST_CASE("event log round trip is bit exact") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    mb::MonitorGraph g = mbtest::RandomGraph(rng, 6);
    std::vector<mb::RobotPose> p0;
    mb::SegmentPlan plan = RandomPlan(rng, g, 1 + static_cast<int>(rng() % 3), 8, p0);
    mb::EventLog log = mb::RunPlan(g, p0, plan, Rational(12));

    std::ostringstream out;
    mb::WriteEventLog(g, log, out);
    std::istringstream in(out.str());
    mb::EventLog back = mb::ReadEventLog(g, in);
    CHECK(back == log);

    std::ostringstream out2;
    mb::WriteEventLog(g, back, out2);
    CHECK(out.str() == out2.str());

    mb::EventLog replayed = mb::ReplayLog(g, log);
    CHECK(replayed == log);
  }
}

TEST_CASE("latency invariants on random plans") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    mb::MonitorGraph g = mbtest::RandomGraph(rng, 6);
    std::vector<mb::RobotPose> p0;
    mb::SegmentPlan plan = RandomPlan(rng, g, 2, 10, p0);
    mb::EventLog log = mb::RunPlan(g, p0, plan, Rational(15));
    for (const auto& rec : log.records) {
      for (const auto& l : rec.latencies) {
        CHECK(l >= 0);
        CHECK(l <= rec.t);
      }
    }
    CHECK(log.end_time == Rational(15));
  }
}

TEST_CASE("coverage lemma on random rollouts") {
  std::mt19937_64 rng(31);
  int windows = 0;
  for (int trial = 0; trial < 200; ++trial) {
    mb::MonitorGraph g = mbtest::RandomGraph(rng, 6);
    std::vector<mb::RobotPose> p0;
    mb::SegmentPlan plan = RandomPlan(rng, g, 1 + static_cast<int>(rng() % 3), 10, p0);
    mb::EventLog log = mb::RunPlan(g, p0, plan, Rational(12));
    if (log.records.size() < 2) continue;
    const size_t a = rng() % (log.records.size() - 1);
    const Rational alpha = log.records[a].t;
    const Rational beta = log.end_time;
    const Rational window_sup = mb::TailSup(g, log, alpha, beta);
    if (beta - alpha > window_sup / g.w_min()) {
      ++windows;
      for (int v = 0; v < g.num_nodes(); ++v) {
        CHECK(mb::VisitedInWindow(g, log, v, alpha, beta));
      }
    }
  }
  CHECK(windows > 0);
}

TEST_CASE("latency after a visit is independent of initial latencies") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 200; ++trial) {
    mb::MonitorGraph g = mbtest::RandomGraph(rng, 6);
    std::vector<mb::RobotPose> p0;
    mb::SegmentPlan plan = RandomPlan(rng, g, 2, 8, p0);
    mb::EventLog log = mb::RunPlan(g, p0, plan, Rational(10));

    mb::WorldState base = mb::WorldReset(g, p0);
    mb::WorldState shifted = base;
    std::vector<Rational> bump(g.num_nodes());
    for (int v = 0; v < g.num_nodes(); ++v) {
      // Occupied nodes have their latency pinned at zero; only unoccupied
      // initial conditions may be perturbed.
      bool occupied = false;
      for (const auto& p : p0) occupied = occupied || p.from == v;
      if (occupied) continue;
      bump[v] = Rational(static_cast<int>(rng() % 5), 2);
      shifted.latencies[v] += bump[v];
    }
    for (const auto& rec : log.records) {
      mb::WorldStepInPlace(g, base, rec.action, rec.dt, true);
      mb::WorldStepInPlace(g, shifted, rec.action, rec.dt, true);
    }
    for (int v = 0; v < g.num_nodes(); ++v) {
      if (mb::VisitedInWindow(g, log, v, 0, log.end_time)) {
        CHECK(base.latencies[v] == shifted.latencies[v]);
      } else {
        CHECK(shifted.latencies[v] - base.latencies[v] == bump[v]);
      }
    }
  }
}

TEST_CASE("metrics on the sigma2 run") {
  mb::MonitorGraph g = mbtest::LoadInstance("long_edge.json");
  mb::EventLog log = RunExample(g, mbtest::Sigma2(g), 30);
  mb::MetricsReport rep = mb::ComputeMetrics(g, log, 5, 30);
  CHECK(rep.wi == Rational(5));
  CHECK(rep.tail_wi == Rational(3, 2));
  CHECK(rep.agi > 0);
  CHECK(rep.igi_series.size() == rep.iwi_series.size());
  // IWI at the peak: node 4's latency reaches 5 just before the first visit.
  CHECK(mb::Iwi(g, log, Rational(5)) == Rational(1));
  CHECK(mb::Iwi(g, log, Rational(9, 2)) == Rational(9, 2));

  std::ostringstream csv;
  mb::WriteMetricsCsv(rep, csv);
  CHECK(csv.str().rfind("t,igi,iwi", 0) == 0);
  std::ostringstream summary;
  mb::WriteMetricsSummary(rep, summary);
  CHECK(summary.str().find("tail_wi") != std::string::npos);
}

TEST_CASE("average graph idleness closed form on a parked robot") {
  // Single node occupied forever: AGI = 0. Two-node graph, robot parked at 1:
  // node 2's latency grows linearly, IGI = t/2, AGI(H) = H/4.
  mb::MonitorGraph g = mbtest::LoadInstance("two_node.json");
  mb::SegmentPlan plan;
  plan.robots.resize(1);
  mb::EventLog log = mb::RunPlan(g, {mb::RobotPose::At(0)}, plan, 8);
  CHECK(mb::Agi(g, log, 8) == Rational(2));
  CHECK(mb::Wi(g, log, 8) == Rational(8));
}
