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

// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "monitorbench/learning.hpp"
#include "monitorbench/metrics.hpp"
#include "monitorbench/oracle.hpp"
#include "monitorbench/policy.hpp"
#include "test_util.hpp"

using mb::Rational;

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Check {
  bool ok = true;
  std::string detail;

  void Require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

// --- criterion 1: example strategies -----------------------------------

void ExampleStrategies(Check& c) {
  const auto start = Clock::now();
  mb::MonitorGraph g = mbtest::LoadInstance("long_edge.json");

  mbtest::ExamplePlan s1 = mbtest::Sigma1(g);
  mb::EventLog l1 = mb::RunPlan(g, s1.p0, s1.plan, Rational(30));
  c.Require(mb::TailWi(g, l1, 0, Rational(30)) == Rational(3, 2),
            "sigma1 tail_wi(0) != 3/2");

  mbtest::ExamplePlan s2 = mbtest::Sigma2(g);
  mb::EventLog l2 = mb::RunPlan(g, s2.p0, s2.plan, Rational(30));
  c.Require(mb::Wi(g, l2, Rational(30)) == Rational(5), "sigma2 wi != 5");
  c.Require(mb::TailWi(g, l2, Rational(5), Rational(30)) == Rational(3, 2),
            "sigma2 tail_wi(5) != 3/2");

  mbtest::ExamplePlan s3 = mbtest::Sigma3(g);
  mb::EventLog l3 = mb::RunPlan(g, s3.p0, s3.plan, Rational(30));
  c.Require(mb::Wi(g, l3, Rational(30)) == Rational(5), "sigma3 wi != 5");
  c.Require(mb::TailWi(g, l3, Rational(5), Rational(30)) == Rational(2),
            "sigma3 tail_wi(5) != 2");

  c.Require(Seconds(start) < 1.0, "runtime >= 1 s");
}

// --- criterion 2: tracker consistency -----------------------------------

void TrackerConsistency(Check& c) {
  std::mt19937_64 rng(1001);
  std::unique_ptr<mb::Policy> policy = mb::MakeRandomPolicy();
  const std::vector<Rational> ts = {Rational(0), Rational(1), Rational(5, 2),
                                    Rational(4)};
  for (int trial = 0; trial < 100; ++trial) {
    mb::MonitorGraph g = mbtest::RandomGraph(rng, 6);
    mb::MdpConfig cfg;
    cfg.delta = (rng() % 2 == 0) ? Rational(1) : Rational(1, 2);
    cfg.kappa_max = 2;
    cfg.T = ts[rng() % ts.size()];
    const int k = 1 + static_cast<int>(rng() % 3);
    std::vector<mb::RobotPose> p0 = mbtest::RandomPoses(rng, g, k);
    auto instance = policy->Instantiate(rng());
    mb::RolloutResult rr = mb::RunRollout(g, cfg, *instance, p0, Rational(10));
    for (const auto& step : rr.rollout.steps) {
      if (step.t_after < *cfg.T) {
        c.Require(step.z_after == 0, "z nonzero before T");
      } else {
        c.Require(step.z_after == mb::TailSup(g, rr.log, *cfg.T, step.t_after),
                  "z != tail sup at an event");
      }
    }
  }
}

// --- criterion 3: oracle ground truth ------------------------------------

void OracleGroundTruth(Check& c) {
  struct Case {
    const char* graph;
    std::vector<mb::RobotPose> p0;
    Rational delta;
    int kappa;
    Rational expect;
  };
  const std::vector<Case> cases = {
      {"two_node.json", {mb::RobotPose::At(0)}, Rational(10), 2, Rational(40)},
      {"triangle.json", {mb::RobotPose::At(0)}, Rational(1), 2, Rational(3)},
      {"triangle.json",
       {mb::RobotPose::At(0), mb::RobotPose::At(0), mb::RobotPose::At(0)},
       Rational(1),
       1,
       Rational(1)},
  };
  for (const auto& cs : cases) {
    const auto start = Clock::now();
    mb::MonitorGraph g = mbtest::LoadInstance(cs.graph);
    mb::MdpConfig cfg;
    cfg.delta = cs.delta;
    cfg.kappa_max = cs.kappa;
    mb::OracleResult res = mb::ExactOptimum(g, cfg, cs.p0, 0);
    c.Require(res.found && res.certified,
              std::string(cs.graph) + ": not certified");
    c.Require(res.j_star == cs.expect,
              std::string(cs.graph) + ": wrong optimum");
    c.Require(Seconds(start) < 60.0, std::string(cs.graph) + ": > 60 s");
  }
}

// --- criterion 4: discretization bound ------------------------------------

void DiscretizationBound(Check& c) {
  const auto start = Clock::now();
  std::mt19937_64 rng(1004);
  for (int trial = 0; trial < 20; ++trial) {
    mb::MonitorGraph g = mbtest::RandomGraph(rng, 5, /*unit_weights=*/true);
    std::vector<mb::RobotPose> p0 = mbtest::RandomPoses(rng, g, 1);
    mb::DiscretizationReport rep = mb::VerifyDiscretization(
        g, p0, Rational(2), Rational(1, 2), 1, 0);
    c.Require(rep.certified, "reference search not certified");
    c.Require(rep.holds, "bound violated");
  }
  c.Require(Seconds(start) < 600.0, "runtime >= 10 min");
}

// --- criterion 5: objective equivalence ------------------------------------

void ObjectiveEquivalence(Check& c) {
  mb::MonitorGraph tri = mbtest::LoadInstance("triangle.json");
  mb::MdpConfig cfg;
  cfg.T = Rational(0);
  cfg.delta = Rational(1);
  cfg.kappa_max = 2;
  std::unique_ptr<mb::Policy> tsp =
      mb::MakeTspCyclePolicy(tri, 1, {mb::RobotPose::At(0)});
  auto instance = tsp->Instantiate(7);
  // 200 tour cycles of length 3.
  mb::RolloutResult rr = mb::RunRollout(tri, cfg, *instance,
                                        {mb::RobotPose::At(0)}, Rational(600));
  const Rational step_avg =
      mb::AverageRewardEstimate(rr.rollout, mb::AverageMode::kStep);
  const Rational time_avg =
      mb::AverageRewardEstimate(rr.rollout, mb::AverageMode::kTimeNormalized);
  c.Require(step_avg > 0 && time_avg > 0, "degenerate estimators");
  const Rational rel = mb::RationalAbs(step_avg - time_avg) / time_avg;
  c.Require(rel <= Rational(1, 50), "estimators differ by more than 2%");

  // Always-wait pathology on the two-node instance.
  mb::MonitorGraph two = mbtest::LoadInstance("two_node.json");
  mb::MdpConfig wcfg;
  wcfg.T = Rational(0);
  wcfg.delta = Rational(1, 10);
  wcfg.kappa_max = 1;
  const Rational A(20);
  mb::EventState s = mb::MdpReset(two, std::vector<int>{0}, wcfg);
  mb::MdpRollout rollout;
  bool crossed = false;
  for (int n = 1; n <= 450; ++n) {
    mb::TransitionResult tr =
        mb::MdpTransition(two, wcfg, s, {mb::AgentAction::Wait(1)});
    rollout.steps.push_back(
        {{mb::AgentAction::Wait(1)}, tr.dt, tr.state.z, tr.state.clock});
    s = tr.state;
    const Rational step =
        mb::AverageRewardEstimate(rollout, mb::AverageMode::kStep);
    const Rational timed =
        mb::AverageRewardEstimate(rollout, mb::AverageMode::kTimeNormalized);
    c.Require(step == wcfg.delta * (n + 1) / 2, "step closed form mismatch");
    c.Require(timed == (wcfg.delta * n + wcfg.delta) / 2,
              "time-normalized closed form mismatch");
    if (n <= 399) c.Require(step <= A, "crossover before 400 steps");
    if (n == 400) {
      c.Require(step > A, "no crossover at 400 steps");
      crossed = true;
    }
  }
  c.Require(crossed, "always-wait run too short");
}

// --- criterion 6: trans-gae reduction ------------------------------------

std::vector<double> StandardGae(const mb::AgentBatch& b) {
  const size_t n = b.rewards.size();
  std::vector<double> adv(n, 0.0);
  double next = 0.0;
  for (size_t idx = n; idx-- > 0;) {
    double delta = -b.values[idx];
    double disc = 1.0;
    delta += disc * b.rewards[idx];
    disc *= b.gamma;
    const double bootstrap =
        (idx + 1 < n) ? b.values[idx + 1] : (b.terminal ? 0.0 : b.final_value);
    delta += disc * bootstrap;
    adv[idx] = delta + std::pow(b.gamma * b.lambda, 1.0) * next;
    next = adv[idx];
  }
  return adv;
}

void TransGaeReduction(Check& c) {
  std::mt19937_64 rng(1006);
  std::uniform_real_distribution<double> ur(-2.0, 2.0);
  std::uniform_real_distribution<double> ug(0.8, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    mb::AgentBatch b;
    const int n = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) {
      b.rewards.push_back(ur(rng));
      b.values.push_back(ur(rng));
      b.active.push_back(1);
      b.dts.push_back(1.0);
    }
    b.gamma = ug(rng);
    b.lambda = ug(rng);
    b.terminal = (rng() % 2) == 0;
    b.final_value = ur(rng);
    mb::GaeResult folded = mb::TransGae(b);
    std::vector<double> reference = StandardGae(b);
    for (size_t i = 0; i < reference.size(); ++i) {
      c.Require(folded.advantages[i] == reference[i],
                "all-active fold differs from standard gae");
    }
  }
  for (int trial = 0; trial < 200; ++trial) {
    mb::AgentBatch b;
    const int n = 2 + static_cast<int>(rng() % 10);
    for (int i = 0; i < n; ++i) {
      b.rewards.push_back(ur(rng));
      b.values.push_back(ur(rng));
      b.active.push_back(rng() % 2);
      b.dts.push_back(1.0);
    }
    b.gamma = 0.95;
    b.lambda = 0.9;
    mb::GaeResult r = mb::TransGae(b);
    for (int i = 0; i < n; ++i) {
      if (!b.active[i]) {
        c.Require(r.advantages[i] == 0.0, "inactive advantage nonzero");
      }
    }
  }
}

// --- criterion 7: counterfactual credit ------------------------------------

void CounterfactualCredit(Check& c) {
  std::mt19937_64 rng(1007);
  std::unique_ptr<mb::Policy> policy = mb::MakeRandomPolicy();
  int checked = 0;
  while (checked < 10000) {
    mb::MonitorGraph g = mbtest::RandomGraph(rng, 5);
    mb::MdpConfig cfg;
    cfg.T = Rational(0);
    cfg.delta = Rational(1, 2);
    cfg.kappa_max = 2;
    const int k = 1 + static_cast<int>(rng() % 3);
    std::vector<mb::RobotPose> p0 = mbtest::RandomPoses(rng, g, k);
    auto instance = policy->Instantiate(rng());
    mb::EventState s = mb::MdpReset(g, p0, cfg);
    for (int step = 0; step < 6 && checked < 10000; ++step) {
      std::vector<mb::AgentAction> joint;
      for (int r = 0; r < k; ++r) {
        auto legal = mb::LegalActions(g, cfg, s, r);
        joint.push_back(legal[rng() % legal.size()]);
      }
      for (int r = 0; r < k; ++r) {
        if (!s.poses[r].ready()) continue;
        mb::CounterfactualResult cr = mb::CounterfactualRewards(g, cfg, s, joint, r);
        c.Require(cr.r_l >= 0, "R_L < 0");
        c.Require(cr.r_z >= 0, "R_z < 0");
        ++checked;
      }
      s = mb::MdpTransition(g, cfg, s, joint).state;
    }
  }

  // A waiting robot that visits nothing new equals its own baseline.
  mb::MonitorGraph two = mbtest::LoadInstance("two_node.json");
  mb::MdpConfig cfg;
  cfg.T = Rational(0);
  cfg.delta = Rational(1);
  cfg.kappa_max = 1;
  mb::EventState s = mb::MdpReset(two, std::vector<int>{0, 0}, cfg);
  mb::TransitionResult warm =
      mb::MdpTransition(two, cfg, s, {mb::AgentAction::Wait(1), mb::AgentAction::Wait(1)});
  mb::CounterfactualResult cr = mb::CounterfactualRewards(
      two, cfg, warm.state, {mb::AgentAction::Wait(1), mb::AgentAction::Wait(1)}, 1);
  c.Require(cr.r_l == 0 && cr.r_z == 0 && cr.combined == 0,
            "baseline-equals-action not (0,0,0)");
}

// --- criterion 8: learning sanity ------------------------------------

void LearningSanity(Check& c) {
  const auto start = Clock::now();

  struct Case {
    const char* graph;
    Rational delta;
    double gamma;  // matched to the instance's event timescale
    Rational j_star;
    Rational t_tail;
    Rational horizon;
  };
  const std::vector<Case> cases = {
      {"two_node.json", Rational(10), 0.98, Rational(40), Rational(40),
       Rational(240)},
      {"triangle.json", Rational(1), 0.9, Rational(3), Rational(6),
       Rational(36)},
  };
  for (const auto& cs : cases) {
    mb::MonitorGraph g = mbtest::LoadInstance(cs.graph);
    mb::MdpConfig cfg;
    cfg.T = Rational(0);
    cfg.delta = cs.delta;
    cfg.kappa_max = 2;
    mb::QConfig qcfg;
    qcfg.budget = 100000;
    qcfg.gamma = cs.gamma;
    qcfg.alpha = 0.3;
    qcfg.episode_events = 32;
    mb::QLearnResult learned =
        mb::SmdpQLearn(g, cfg, {mb::RobotPose::At(0)}, qcfg, 17);
    c.Require(learned.updates >= qcfg.budget, "budget not consumed");
    Rational worst = 0;
    for (int rep = 0; rep < 3; ++rep) {
      auto inst = learned.greedy->Instantiate(100 + rep);
      mb::RolloutResult rr =
          mb::RunRollout(g, cfg, *inst, {mb::RobotPose::At(0)}, cs.horizon);
      worst = std::max(worst, mb::TailWi(g, rr.log, cs.t_tail, cs.horizon));
    }
    c.Require(worst <= cs.j_star * Rational(11, 10),
              std::string(cs.graph) + ": > 10% above the optimum");
  }
  c.Require(Seconds(start) < 120.0, "runtime >= 2 min");

  // Argmax equivalence on the two-node instance: the greedy policy commits
  // to the oracle cycle (always move to the opposite node).
  mb::MonitorGraph two = mbtest::LoadInstance("two_node.json");
  mb::MdpConfig cfg;
  cfg.T = Rational(0);
  cfg.delta = Rational(10);
  cfg.kappa_max = 2;
  mb::QConfig qcfg;
  qcfg.budget = 100000;
  qcfg.gamma = 0.98;
  qcfg.alpha = 0.3;
  qcfg.episode_events = 32;
  mb::QLearnResult learned =
      mb::SmdpQLearn(two, cfg, {mb::RobotPose::At(0)}, qcfg, 17);
  auto inst = learned.greedy->Instantiate(5);
  mb::RolloutResult rr =
      mb::RunRollout(two, cfg, *inst, {mb::RobotPose::At(0)}, Rational(200));
  int at = 0;
  int moves = 0;
  for (const auto& step : rr.rollout.steps) {
    const bool steady = step.t_after - step.dt >= Rational(40);
    if (steady) {
      c.Require(step.joint[0].kind == mb::AgentAction::kMove,
                "steady greedy action is not a move");
    }
    if (step.joint[0].kind != mb::AgentAction::kMove) continue;
    c.Require(step.joint[0].target == 1 - at, "greedy move leaves the cycle");
    at = step.joint[0].target;
    if (steady) ++moves;
  }
  c.Require(moves >= 5, "greedy rollout too short");
}

// --- criterion 9: structural lemmas ------------------------------------

void StructuralLemmas(Check& c) {
  std::unique_ptr<mb::Policy> policy = mb::MakeRandomPolicy();

  // Coverage lemma.
  std::mt19937_64 rng(1009);
  int windows = 0;
  for (int trial = 0; trial < 200; ++trial) {
    mb::MonitorGraph g = mbtest::RandomGraph(rng, 6);
    mb::MdpConfig cfg;
    cfg.delta = Rational(1, 2);
    cfg.kappa_max = 2;
    const int k = 1 + static_cast<int>(rng() % 3);
    std::vector<mb::RobotPose> p0 = mbtest::RandomPoses(rng, g, k);
    auto instance = policy->Instantiate(rng());
    mb::RolloutResult rr = mb::RunRollout(g, cfg, *instance, p0, Rational(12));
    const mb::EventLog& log = rr.log;
    if (log.records.size() < 2) continue;
    const size_t a = rng() % (log.records.size() - 1);
    const Rational alpha = log.records[a].t;
    const Rational beta = log.end_time;
    const Rational window_sup = mb::TailSup(g, log, alpha, beta);
    if (beta - alpha > window_sup / g.w_min()) {
      ++windows;
      for (int v = 0; v < g.num_nodes(); ++v) {
        c.Require(mb::VisitedInWindow(g, log, v, alpha, beta),
                  "coverage lemma violated");
      }
    }
  }
  c.Require(windows > 0, "no qualifying coverage windows");

  // Independence after a visit.
  for (int trial = 0; trial < 200; ++trial) {
    mb::MonitorGraph g = mbtest::RandomGraph(rng, 6);
    mb::MdpConfig cfg;
    cfg.delta = Rational(1, 2);
    cfg.kappa_max = 2;
    std::vector<mb::RobotPose> p0 = mbtest::RandomPoses(rng, g, 2);
    auto instance = policy->Instantiate(rng());
    mb::RolloutResult rr = mb::RunRollout(g, cfg, *instance, p0, Rational(10));
    mb::WorldState base = mb::WorldReset(g, p0);
    mb::WorldState shifted = base;
    std::vector<Rational> bump(g.num_nodes());
    for (int v = 0; v < g.num_nodes(); ++v) {
      // Nodes occupied at t = 0 have their latency pinned at zero.
      bool occupied = false;
      for (const auto& p : p0) occupied = occupied || p.from == v;
      if (occupied) continue;
      bump[v] = Rational(static_cast<int>(rng() % 5), 2);
      shifted.latencies[v] += bump[v];
    }
    for (const auto& rec : rr.log.records) {
      mb::WorldStepInPlace(g, base, rec.action, rec.dt, true);
      mb::WorldStepInPlace(g, shifted, rec.action, rec.dt, true);
    }
    for (int v = 0; v < g.num_nodes(); ++v) {
      if (mb::VisitedInWindow(g, rr.log, v, 0, rr.log.end_time)) {
        c.Require(base.latencies[v] == shifted.latencies[v],
                  "visited latency depends on the initial condition");
      } else {
        c.Require(shifted.latencies[v] - base.latencies[v] == bump[v],
                  "unvisited latency drifted");
      }
    }
  }

  // close_and_loop bound on the continued trajectory.
  int segments = 0;
  while (segments < 100) {
    mb::MonitorGraph g = mbtest::RandomGraph(rng, 5);
    mb::MdpConfig cfg;
    cfg.delta = Rational(1, 2);
    cfg.kappa_max = 2;
    const int k = 1 + static_cast<int>(rng() % 2);
    std::vector<mb::RobotPose> p0 = mbtest::RandomPoses(rng, g, k);
    auto instance = policy->Instantiate(rng());
    mb::RolloutResult rr = mb::RunRollout(g, cfg, *instance, p0, Rational(10));
    const mb::EventLog& log = rr.log;
    if (log.records.size() < 3) continue;
    const size_t a = rng() % (log.records.size() - 1);
    const Rational alpha = log.records[a].t;
    const Rational beta = log.end_time;
    if (!(alpha < beta)) continue;

    mb::PeriodicStrategy strat = mb::CloseAndLoop(g, log, alpha, beta);
    const Rational theta = strat.period - (beta - alpha);
    c.Require(theta >= 0, "negative connection time");

    mb::SegmentPlan extended;
    extended.robots.resize(k);
    std::vector<size_t> consumed(k, 0);
    for (const auto& rec : log.records) {
      for (int r = 0; r < k; ++r) {
        if (!rec.action[r].has_value()) continue;
        const mb::Command& cmd = *rec.action[r];
        if (rec.t >= alpha) ++consumed[r];
        if (cmd.kind == mb::Command::kMove) {
          extended.robots[r].prefix.push_back(mb::Segment::Traverse(cmd.target));
        } else {
          extended.robots[r].prefix.push_back(mb::Segment::Wait(cmd.wait));
        }
      }
    }
    for (int r = 0; r < k; ++r) {
      const auto& cycle = strat.plan.robots[r].cycle;
      for (size_t i = consumed[r]; i < cycle.size(); ++i) {
        extended.robots[r].prefix.push_back(cycle[i]);
      }
    }
    mb::EventLog ext = mb::RunPlan(g, log.initial_poses, extended, beta + theta);
    const Rational lhs = mb::TailSup(g, ext, alpha, beta + theta);
    const Rational rhs = mb::TailSup(g, log, alpha, beta) + g.w_max() * theta;
    c.Require(lhs <= rhs, "close_and_loop bound violated");
    ++segments;
  }
}

// --- criterion 10: explicit exclusion ------------------------------------

void ScopeExclusion(Check& c) {
  // The published full-scale experiments (city-street map runs and deep
  // multi-agent training curves) depend on private assets and GPU-scale
  // compute; they are out of scope by design and replaced by criteria 1-9.
  c.Require(true, "");
}

}  // namespace

int main() {
  struct Entry {
    int index;
    const char* name;
    std::function<void(Check&)> fn;
  };
  const std::vector<Entry> entries = {
      {1, "example strategies (sigma1/sigma2/sigma3 exact values)",
       ExampleStrategies},
      {2, "tracker consistency on 100 random rollouts", TrackerConsistency},
      {3, "oracle ground truth (two-node, triangle k=1, triangle k=3)",
       OracleGroundTruth},
      {4, "discretization bound on 20 random instances", DiscretizationBound},
      {5, "objective equivalence and always-wait pathology",
       ObjectiveEquivalence},
      {6, "trans-gae reduction and inactive-step zeros", TransGaeReduction},
      {7, "counterfactual credit nonnegativity", CounterfactualCredit},
      {8, "tabular learning reaches the oracle optimum", LearningSanity},
      {9, "structural lemmas (coverage, independence, close-and-loop)",
       StructuralLemmas},
      {10, "full-scale city/deep-training results excluded by design",
       ScopeExclusion},
  };

  int failures = 0;
  for (const auto& entry : entries) {
    Check check;
    const auto start = Clock::now();
    try {
      entry.fn(check);
    } catch (const std::exception& e) {
      check.ok = false;
      check.detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %2d: %s — %s (%.1fs)%s%s\n", entry.index,
                check.ok ? "PASS" : "FAIL", entry.name, Seconds(start),
                check.ok ? "" : " :: ", check.ok ? "" : check.detail.c_str());
    std::fflush(stdout);
    if (!check.ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
