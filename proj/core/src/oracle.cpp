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

#include "monitorbench/oracle.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mb {
namespace {

std::string StateKey(const EventState& s) {
  std::ostringstream os;
  for (const auto& p : s.poses) {
    os << p.from << ',' << p.to << ',' << FormatRatio(p.remaining) << ';';
  }
  os << '|';
  for (const auto& l : s.latencies) os << FormatRatio(l) << ';';
  os << '|' << FormatRatio(s.eta);
  return os.str();
}

bool InterchangeableReady(const EventState& s, int a, int b) {
  return s.poses[a].ready() && s.poses[a].stationary() &&
         s.poses[b] == s.poses[a];
}

// Joint actions, with a canonical-order reduction: co-located ready robots
// are interchangeable, so their action indices are required non-decreasing
// in robot order.
std::vector<std::vector<AgentAction>> EnumerateJoints(const MonitorGraph& g,
                                                      const MdpConfig& cfg,
                                                      const EventState& s) {
  const int k = static_cast<int>(s.poses.size());
  std::vector<std::vector<AgentAction>> options(k);
  for (int r = 0; r < k; ++r) options[r] = LegalActions(g, cfg, s, r);

  std::vector<std::vector<AgentAction>> joints;
  std::vector<AgentAction> cur(k);
  std::vector<int> idx(k, 0);
  std::function<void(int)> rec = [&](int r) {
    if (r == k) {
      joints.push_back(cur);
      return;
    }
    int start = 0;
    for (int q = r - 1; q >= 0; --q) {
      if (InterchangeableReady(s, r, q)) {
        start = idx[q];
        break;
      }
    }
    for (int i = start; i < static_cast<int>(options[r].size()); ++i) {
      idx[r] = i;
      cur[r] = options[r][i];
      rec(r + 1);
    }
  };
  rec(0);
  return joints;
}

struct SearchCtx {
  const MonitorGraph& g;
  const MdpConfig& cfg;
  Rational T;
  Rational seed;  // achievable upper bound on the optimum
  std::optional<Rational> user_cap;
  std::int64_t max_depth;
  std::int64_t max_nodes;

  std::int64_t nodes = 0;
  bool depth_hit = false;
  bool node_hit = false;
  bool cap_pruned = false;

  bool found = false;
  Rational best = 0;
  bool have_bound = false;
  Rational bound = 0;  // current incumbent value (or user incumbent)

  std::unordered_map<std::string, std::size_t> on_path;
  std::map<std::string, Rational> seen;  // dominance: key -> min tracker
  std::vector<std::vector<AgentAction>> path_actions;
  std::vector<Rational> path_clocks;

  std::vector<std::vector<AgentAction>> best_actions;
  std::size_t best_cut = 0;
  Rational best_prefix_duration = 0;
  Rational best_period = 0;
};

void Dfs(SearchCtx& c, const EventState& s, std::int64_t depth) {
  const auto joints = EnumerateJoints(c.g, c.cfg, s);
  for (const auto& joint : joints) {
    if (c.nodes >= c.max_nodes) {
      c.node_hit = true;
      return;
    }
    ++c.nodes;
    TransitionResult tr = MdpTransition(c.g, c.cfg, s, joint);
    const Rational& z = tr.state.z;
    const bool active = tr.state.eta == c.T;
    if (active) {
      Rational other = c.seed;
      if (c.have_bound && c.bound < other) other = c.bound;
      if (c.user_cap && z > *c.user_cap) {
        if (z <= other) c.cap_pruned = true;
        continue;
      }
      if (z > other) continue;
    }
    const std::string key = StateKey(tr.state);
    auto pit = c.on_path.find(key);
    if (pit != c.on_path.end()) {
      // Cycle closed: the looped strategy's tail value is the running
      // supremum at the repeat.
      if (active && (!c.found || z < c.best)) {
        c.found = true;
        c.best = z;
        c.have_bound = true;
        c.bound = z;
        c.best_actions = c.path_actions;
        c.best_actions.push_back(joint);
        c.best_cut = pit->second;
        c.best_prefix_duration = c.path_clocks[pit->second];
        c.best_period = tr.state.clock - c.path_clocks[pit->second];
      }
      continue;
    }
    if (active) {
      auto [dit, fresh] = c.seen.try_emplace(key, z);
      if (!fresh) {
        if (dit->second <= z) continue;
        dit->second = z;
      }
    }
    if (depth + 1 >= c.max_depth) {
      c.depth_hit = true;
      continue;
    }
    c.on_path.emplace(key, static_cast<std::size_t>(depth + 1));
    c.path_actions.push_back(joint);
    c.path_clocks.push_back(tr.state.clock);
    Dfs(c, tr.state, depth + 1);
    c.path_actions.pop_back();
    c.path_clocks.pop_back();
    c.on_path.erase(key);
  }
}

void AppendActionSegment(const MdpConfig& cfg, const AgentAction& a,
                         std::vector<Segment>& out) {
  switch (a.kind) {
    case AgentAction::kMove:
      out.push_back(Segment::Traverse(a.target));
      break;
    case AgentAction::kWait:
      out.push_back(Segment::Wait(cfg.delta * a.multiples));
      break;
    case AgentAction::kNoop:
      break;
  }
}

// Pose at event time t before the commands issued at t; a freshly commanded
// robot is reported ready at its current node.
RobotPose PoseAt(const EventLog& log, int r, const Rational& t) {
  for (const auto& rec : log.records) {
    if (rec.t == t) {
      if (rec.action[r].has_value()) return RobotPose::At(rec.poses[r].from);
      return rec.poses[r];
    }
  }
  if (t == log.end_time) return log.final_poses[r];
  throw Error("close_and_loop: time is not an event time of the log");
}

}  // namespace

OracleResult ExactOptimum(const MonitorGraph& g, const MdpConfig& cfg,
                          const std::vector<RobotPose>& p0, const Rational& T,
                          const SearchBounds& bounds) {
  MdpConfig c = cfg;
  c.T = T;
  c.Validate();

  Rational seed = 0;
  if (g.num_nodes() > 1) {
    seed = g.w_max() * (Diameter(g) + TspTour(g).length);
  }

  SearchCtx ctx{g, c, T, seed, bounds.latency_cap, bounds.max_depth,
                bounds.max_nodes};
  if (bounds.incumbent) {
    ctx.have_bound = true;
    ctx.bound = *bounds.incumbent;
  }
  EventState root = MdpReset(g, p0, c);
  ctx.on_path.emplace(StateKey(root), 0);
  ctx.path_clocks.push_back(root.clock);
  Dfs(ctx, root, 0);

  OracleResult result;
  result.nodes_expanded = ctx.nodes;
  result.found = ctx.found;
  if (ctx.found) {
    result.j_star = ctx.best;
    const bool cap_sound = !ctx.cap_pruned ||
                           (bounds.latency_cap && *bounds.latency_cap >= ctx.best);
    result.certified = !ctx.depth_hit && !ctx.node_hit && cap_sound;

    PeriodicStrategy strat;
    strat.initial = p0;
    strat.prefix_duration = ctx.best_prefix_duration;
    strat.period = ctx.best_period;
    strat.plan.robots.resize(p0.size());
    for (std::size_t n = 0; n < ctx.best_actions.size(); ++n) {
      for (std::size_t r = 0; r < p0.size(); ++r) {
        auto& rp = strat.plan.robots[r];
        AppendActionSegment(c, ctx.best_actions[n][r],
                            n < ctx.best_cut ? rp.prefix : rp.cycle);
      }
    }
    result.strategy = std::move(strat);
  }
  return result;
}

PeriodicStrategy CloseAndLoop(const MonitorGraph& g, const EventLog& log,
                              const Rational& alpha, const Rational& beta) {
  if (!(alpha < beta)) throw Error("close_and_loop: requires alpha < beta");
  const int k = static_cast<int>(log.initial_poses.size());

  PeriodicStrategy strat;
  strat.prefix_duration = 0;
  strat.plan.robots.resize(k);
  strat.initial.reserve(k);
  for (int r = 0; r < k; ++r) strat.initial.push_back(PoseAt(log, r, alpha));

  for (const auto& rec : log.records) {
    if (rec.t < alpha || rec.t >= beta) continue;
    for (int r = 0; r < k; ++r) {
      if (!rec.action[r].has_value()) continue;
      const Command& cmd = *rec.action[r];
      auto& cyc = strat.plan.robots[r].cycle;
      if (cmd.kind == Command::kMove) {
        cyc.push_back(Segment::Traverse(cmd.target));
      } else {
        cyc.push_back(Segment::Wait(cmd.wait));
      }
    }
  }

  bool exact = true;
  for (int r = 0; r < k; ++r) {
    if (!(PoseAt(log, r, beta) == strat.initial[r])) {
      exact = false;
      break;
    }
  }
  if (exact) {
    strat.period = beta - alpha;
    return strat;
  }

  // Connection: each robot finishes its pending motion, steers along the
  // canonical path to the alpha-pose entry node, then waits so that all
  // robots re-enter the alpha configuration simultaneously at beta + theta.
  std::vector<Rational> land(k), steer(k), lead(k), need(k);
  std::vector<int> land_node(k), entry(k);
  Rational theta = 0;
  for (int r = 0; r < k; ++r) {
    RobotPose pb = PoseAt(log, r, beta);
    land[r] = pb.remaining;
    land_node[r] = pb.stationary() ? pb.from : pb.to;
    const RobotPose& pa = strat.initial[r];
    entry[r] = pa.from;
    lead[r] = 0;
    if (!pa.stationary()) {
      auto e = g.edge_between(pa.from, pa.to);
      if (!e) throw Error("close_and_loop: alpha pose on unknown edge");
      lead[r] = g.edge(*e).length - pa.remaining;
    }
    steer[r] = g.node_distance(land_node[r], entry[r]);
    need[r] = land[r] + steer[r] + lead[r];
    if (need[r] > theta) theta = need[r];
  }
  for (int r = 0; r < k; ++r) {
    auto& cyc = strat.plan.robots[r].cycle;
    const std::vector<int> hops = g.node_path(land_node[r], entry[r]);
    for (std::size_t i = 1; i < hops.size(); ++i) {
      cyc.push_back(Segment::Traverse(hops[i]));
    }
    const RobotPose& pa = strat.initial[r];
    const Rational arrive = land[r] + steer[r];
    if (pa.stationary()) {
      Rational w = theta - arrive + pa.remaining;
      if (w > 0) cyc.push_back(Segment::Wait(std::move(w)));
    } else {
      Rational w = theta - lead[r] - arrive;
      if (w > 0) cyc.push_back(Segment::Wait(std::move(w)));
      cyc.push_back(Segment::Traverse(pa.to));
    }
  }
  strat.period = (beta - alpha) + theta;
  return strat;
}

std::optional<Rational> EvaluatePeriodic(const MonitorGraph& g,
                                         const PeriodicStrategy& strategy,
                                         const Rational& T) {
  if (strategy.period == 0) {
    // Degenerate strategy: after the prefix every robot parks forever; the
    // tail value is 0 when every node ends up occupied, +infinity otherwise.
    EventLog log = RunPlan(g, strategy.initial, strategy.plan,
                           strategy.prefix_duration);
    std::vector<bool> occupied(g.num_nodes(), false);
    for (const auto& p : log.final_poses) {
      if (p.stationary()) occupied[p.from] = true;
    }
    for (bool o : occupied) {
      if (!o) return std::nullopt;
    }
    return Rational(0);
  }

  // Third cycle after the prefix, pushed later if T extends past it, so the
  // window is both steady-state and within the evaluation tail.
  Rational ws = strategy.prefix_duration + 2 * strategy.period;
  while (ws < T) ws += strategy.period;
  const Rational horizon = ws + strategy.period;
  EventLog log = RunPlan(g, strategy.initial, strategy.plan, horizon);
  for (int v = 0; v < g.num_nodes(); ++v) {
    if (!VisitedInWindow(g, log, v, ws, horizon)) return std::nullopt;
  }
  return TailSup(g, log, ws, horizon);
}

DiscretizationReport VerifyDiscretization(const MonitorGraph& g,
                                          const std::vector<RobotPose>& p0,
                                          const Rational& delta,
                                          const Rational& delta_ref,
                                          int kappa_max, const Rational& T,
                                          const SearchBounds& bounds) {
  if (delta_ref <= 0 || delta < delta_ref) {
    throw Error("verify: requires 0 < delta_ref <= delta");
  }
  const Rational ratio = delta / delta_ref;
  if (boost::multiprecision::denominator(ratio) != 1) {
    throw Error("verify: delta must be an integer multiple of delta_ref");
  }
  const long mult = static_cast<long>(boost::multiprecision::numerator(ratio));

  MdpConfig coarse;
  coarse.delta = delta;
  coarse.kappa_max = kappa_max;
  MdpConfig fine;
  fine.delta = delta_ref;
  fine.kappa_max = static_cast<int>(kappa_max * mult);  // same tau_max

  OracleResult rc = ExactOptimum(g, coarse, p0, T, bounds);
  OracleResult rf = ExactOptimum(g, fine, p0, T, bounds);

  DiscretizationReport rep;
  rep.j_delta = rc.j_star;
  rep.j_ref = rf.j_star;
  rep.bound = rf.j_star + 2 * g.w_max() * delta;
  rep.slack = rep.bound - rep.j_delta;
  rep.holds = rc.found && rf.found && rep.j_delta <= rep.bound;
  rep.certified = rep.holds && rc.certified && rf.certified;
  return rep;
}

}  // namespace mb
