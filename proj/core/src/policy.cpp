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

#include "monitorbench/policy.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace mb {
namespace {

long long FloorRational(const Rational& q) {
  BigInt n = numerator(q);
  BigInt d = denominator(q);
  BigInt fl = n / d;
  if (n < 0 && fl * d != n) fl -= 1;
  return fl.convert_to<long long>();
}

Rational Mod(const Rational& x, const Rational& period) {
  Rational r = x - Rational(FloorRational(x / period)) * period;
  if (r < 0) r += period;
  if (r >= period) r -= period;
  return r;
}

GraphPoint PoseToPoint(const MonitorGraph& g, const RobotPose& p) {
  if (p.stationary()) return GraphPoint::Node(p.to);
  auto e = g.edge_between(p.from, p.to);
  Rational traveled = g.edge(*e).length - p.remaining;
  if (traveled == 0) return GraphPoint::Node(p.from);
  return GraphPoint::EdgeInterior(p.from, p.to, traveled);
}

// Time until the robot can act from a node, plus the node it acts from.
std::pair<Rational, int> LandingNode(const RobotPose& p) {
  return {p.remaining, p.to};
}

struct WalkPlan {
  std::vector<int> nodes;     // closed walk, last leg back to nodes[0]
  std::vector<Rational> pos;  // cumulative position of nodes[j]
  Rational total = 0;
};

WalkPlan BuildWalkPlan(const MonitorGraph& g, const std::vector<int>& closed_walk) {
  WalkPlan plan;
  plan.nodes.assign(closed_walk.begin(), closed_walk.end() - 1);
  if (plan.nodes.empty()) plan.nodes.push_back(closed_walk.front());
  plan.pos.assign(plan.nodes.size(), Rational(0));
  Rational acc = 0;
  for (size_t j = 0; j + 1 < plan.nodes.size(); ++j) {
    acc += g.node_distance(plan.nodes[j], plan.nodes[j + 1]);
    plan.pos[j + 1] = acc;
  }
  plan.total = acc;
  if (plan.nodes.size() > 1) {
    plan.total += g.node_distance(plan.nodes.back(), plan.nodes.front());
  }
  return plan;
}

struct FollowerSpec {
  int walk = 0;  // index into the policy's walk table
  int anchor = 0;
  Rational tau = 0;  // scheduled departure time from the anchor
};

AgentAction MoveToward(const MonitorGraph& g, int from, int target) {
  std::vector<int> path = g.node_path(from, target);
  return AgentAction::Move(path.at(1));
}

AgentAction DecideFollow(const MonitorGraph& g, const MdpConfig& cfg,
                         const EventState& s, int robot, const WalkPlan& plan,
                         const FollowerSpec& spec) {
  const int v = s.poses[robot].to;
  const Rational& t = s.clock;
  if (plan.nodes.size() == 1) {
    if (v == plan.nodes[0]) return AgentAction::Wait(cfg.kappa_max);
    return MoveToward(g, v, plan.nodes[0]);
  }
  if (t < spec.tau) {
    int anchor_node = plan.nodes[spec.anchor];
    if (v != anchor_node) return MoveToward(g, v, anchor_node);
    long long mult = FloorRational((spec.tau - t) / cfg.delta);
    if (mult >= 1) {
      return AgentAction::Wait(
          static_cast<int>(std::min<long long>(mult, cfg.kappa_max)));
    }
    // Remaining slack is below the wait grid; depart early.
  }
  // Walk-following: pick the occurrence of v closest (circularly) to the
  // scheduled position, then advance.
  Rational p = Mod(plan.pos[spec.anchor] + (t - spec.tau), plan.total);
  int best_j = -1;
  Rational best_d = 0;
  for (size_t j = 0; j < plan.nodes.size(); ++j) {
    if (plan.nodes[j] != v) continue;
    Rational fwd = Mod(plan.pos[j] - p, plan.total);
    Rational bwd = Mod(p - plan.pos[j], plan.total);
    Rational d = std::min(fwd, bwd);
    if (best_j == -1 || d < best_d) {
      best_j = static_cast<int>(j);
      best_d = d;
    }
  }
  if (best_j == -1) return MoveToward(g, v, plan.nodes[spec.anchor]);
  int next = plan.nodes[(best_j + 1) % plan.nodes.size()];
  return AgentAction::Move(next);
}

// Robots ride shared or per-cluster walks; immutable, so one instance class
// serves all rollouts.
class FollowerPolicy : public Policy, public PolicyInstance {
 public:
  FollowerPolicy(std::string name, const MonitorGraph* g,
                 std::vector<WalkPlan> walks, std::vector<FollowerSpec> specs)
      : name_(std::move(name)), g_(g), walks_(std::move(walks)),
        specs_(std::move(specs)) {}

  std::string name() const override { return name_; }

  std::unique_ptr<PolicyInstance> Instantiate(std::uint64_t) const override {
    return std::make_unique<FollowerPolicy>(*this);
  }

  std::vector<AgentAction> Decide(const MonitorGraph& g, const MdpConfig& cfg,
                                  const EventState& s) override {
    std::vector<AgentAction> joint(s.poses.size(), AgentAction::Noop());
    for (size_t r = 0; r < s.poses.size(); ++r) {
      if (!s.poses[r].ready()) continue;
      const FollowerSpec& spec = specs_.at(r);
      joint[r] = DecideFollow(g, cfg, s, static_cast<int>(r),
                              walks_[spec.walk], spec);
    }
    return joint;
  }

 private:
  std::string name_;
  const MonitorGraph* g_;
  std::vector<WalkPlan> walks_;
  std::vector<FollowerSpec> specs_;
};

// Schedules follower departure times so walk positions stay offset by
// offsets[i] while respecting each robot's travel time to its anchor.
std::vector<FollowerSpec> ScheduleFollowers(
    const MonitorGraph& g, const WalkPlan& plan, int walk_index,
    const std::vector<RobotPose>& p0, const std::vector<int>& robots,
    const std::vector<Rational>& offsets) {
  std::vector<FollowerSpec> specs(robots.size());
  std::vector<Rational> phi(robots.size());
  std::vector<Rational> dist(robots.size());
  for (size_t i = 0; i < robots.size(); ++i) {
    specs[i].walk = walk_index;
    int anchor = 0;
    Rational anchor_pos = plan.total;  // wraparound sentinel
    for (size_t j = 0; j < plan.pos.size(); ++j) {
      if (plan.pos[j] >= offsets[i]) {
        anchor = static_cast<int>(j);
        anchor_pos = plan.pos[j];
        break;
      }
    }
    specs[i].anchor = anchor;
    phi[i] = anchor_pos;
    auto [lead, node] = LandingNode(p0[robots[i]]);
    dist[i] = lead + g.node_distance(node, plan.nodes[anchor]);
  }
  Rational t0 = 0;
  for (size_t i = 0; i < robots.size(); ++i) {
    Rational cand = dist[i] + offsets[i] - phi[i];
    if (cand > t0) t0 = cand;
  }
  for (size_t i = 0; i < robots.size(); ++i) {
    specs[i].tau = t0 + phi[i] - offsets[i];
  }
  return specs;
}

std::vector<int> SubsetTspOrder(const MonitorGraph& g,
                                const std::vector<int>& nodes) {
  std::vector<int> order(nodes);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return g.node_id(a) < g.node_id(b);
  });
  std::vector<int> tour{order[0]};
  std::vector<char> used(order.size(), 0);
  used[0] = 1;
  while (tour.size() < order.size()) {
    int cur = tour.back();
    int pick = -1;
    for (size_t i = 0; i < order.size(); ++i) {
      if (used[i]) continue;
      if (pick == -1 ||
          g.node_distance(cur, order[i]) < g.node_distance(cur, order[pick])) {
        pick = static_cast<int>(i);
      }
    }
    used[pick] = 1;
    tour.push_back(order[pick]);
  }
  const int n = static_cast<int>(tour.size());
  bool improved = true;
  while (improved && n >= 4) {
    improved = false;
    for (int i = 1; i < n - 1 && !improved; ++i) {
      for (int j = i + 1; j < n && !improved; ++j) {
        int a = tour[i - 1], b = tour[i], c = tour[j], d = tour[(j + 1) % n];
        if (g.node_distance(a, c) + g.node_distance(b, d) <
            g.node_distance(a, b) + g.node_distance(c, d)) {
          std::reverse(tour.begin() + i, tour.begin() + j + 1);
          improved = true;
        }
      }
    }
  }
  return tour;
}

std::vector<int> ExpandClosedWalk(const MonitorGraph& g,
                                  const std::vector<int>& tour) {
  std::vector<int> walk{tour[0]};
  for (size_t i = 0; i < tour.size(); ++i) {
    std::vector<int> leg = g.node_path(tour[i], tour[(i + 1) % tour.size()]);
    for (size_t j = 1; j < leg.size(); ++j) walk.push_back(leg[j]);
  }
  return walk;
}

}  // namespace

std::unique_ptr<Policy> MakeTspCyclePolicy(const MonitorGraph& g, int k,
                                           const std::vector<RobotPose>& p0) {
  if (k < 1 || static_cast<int>(p0.size()) != k) {
    throw Error("tsp_cycle: robot count mismatch");
  }
  TspResult tsp = TspTour(g);
  WalkPlan plan = BuildWalkPlan(g, TourWalk(g, tsp.tour));
  std::vector<int> robots(k);
  std::iota(robots.begin(), robots.end(), 0);
  std::vector<Rational> offsets(k);
  for (int i = 0; i < k; ++i) offsets[i] = plan.total * i / k;
  std::vector<FollowerSpec> specs =
      ScheduleFollowers(g, plan, 0, p0, robots, offsets);
  return std::make_unique<FollowerPolicy>("tsp_cycle", &g,
                                          std::vector<WalkPlan>{plan}, specs);
}

std::unique_ptr<Policy> MakePartitionPolicy(const MonitorGraph& g, int k,
                                            const std::vector<RobotPose>& p0) {
  if (k < 1 || static_cast<int>(p0.size()) != k) {
    throw Error("partition: robot count mismatch");
  }
  const int n = g.num_nodes();
  const int c = std::min(k, n);

  std::vector<int> by_id(n);
  std::iota(by_id.begin(), by_id.end(), 0);
  std::sort(by_id.begin(), by_id.end(),
            [&](int a, int b) { return g.node_id(a) < g.node_id(b); });

  // Greedy k-center seeds: farthest-point traversal, ties by node id.
  std::vector<int> seeds{by_id[0]};
  while (static_cast<int>(seeds.size()) < c) {
    int pick = -1;
    Rational pick_d = 0;
    for (int v : by_id) {
      if (std::find(seeds.begin(), seeds.end(), v) != seeds.end()) continue;
      Rational d = g.node_distance(v, seeds[0]);
      for (int sd : seeds) d = std::min(d, g.node_distance(v, sd));
      if (pick == -1 || d > pick_d) {
        pick = v;
        pick_d = d;
      }
    }
    seeds.push_back(pick);
  }

  // Nearest-seed assignment; ties by lighter weighted load, then seed id.
  std::vector<std::vector<int>> clusters(c);
  std::vector<Rational> load(c, Rational(0));
  for (int i = 0; i < c; ++i) {
    clusters[i].push_back(seeds[i]);
    load[i] = g.weight(seeds[i]);
  }
  for (int v : by_id) {
    if (std::find(seeds.begin(), seeds.end(), v) != seeds.end()) continue;
    int pick = 0;
    for (int i = 1; i < c; ++i) {
      Rational di = g.node_distance(v, seeds[i]);
      Rational dp = g.node_distance(v, seeds[pick]);
      if (di < dp || (di == dp && (load[i] < load[pick] ||
                                   (load[i] == load[pick] &&
                                    g.node_id(seeds[i]) < g.node_id(seeds[pick]))))) {
        pick = i;
      }
    }
    clusters[pick].push_back(v);
    load[pick] += g.weight(v);
  }

  std::vector<WalkPlan> walks;
  for (const auto& cluster : clusters) {
    walks.push_back(BuildWalkPlan(
        g, cluster.size() == 1 ? std::vector<int>{cluster[0], cluster[0]}
                               : ExpandClosedWalk(g, SubsetTspOrder(g, cluster))));
  }

  std::vector<std::vector<int>> walk_robots(c);
  for (int r = 0; r < k; ++r) walk_robots[r % c].push_back(r);
  std::vector<FollowerSpec> specs(k);
  for (int w = 0; w < c; ++w) {
    const auto& robots = walk_robots[w];
    if (robots.empty()) continue;
    std::vector<Rational> offsets(robots.size());
    for (size_t i = 0; i < robots.size(); ++i) {
      offsets[i] = walks[w].total * static_cast<int>(i) /
                   static_cast<int>(robots.size());
    }
    std::vector<FollowerSpec> sub =
        ScheduleFollowers(g, walks[w], w, p0, robots, offsets);
    for (size_t i = 0; i < robots.size(); ++i) specs[robots[i]] = sub[i];
  }
  return std::make_unique<FollowerPolicy>("partition", &g, std::move(walks),
                                          std::move(specs));
}

namespace {

class GreedyLatencyPolicy : public Policy, public PolicyInstance {
 public:
  std::string name() const override { return "greedy_latency"; }
  std::unique_ptr<PolicyInstance> Instantiate(std::uint64_t) const override {
    return std::make_unique<GreedyLatencyPolicy>(*this);
  }
  std::vector<AgentAction> Decide(const MonitorGraph& g, const MdpConfig& cfg,
                                  const EventState& s) override {
    std::vector<AgentAction> joint(s.poses.size(), AgentAction::Noop());
    for (size_t r = 0; r < s.poses.size(); ++r) {
      if (!s.poses[r].ready()) continue;
      int pos = s.poses[r].to;
      int target = -1;
      Rational target_score = 0;
      for (int v = 0; v < g.num_nodes(); ++v) {
        Rational score = g.weight(v) * (s.latencies[v] + g.node_distance(pos, v));
        if (target == -1 || score > target_score ||
            (score == target_score && g.node_id(v) < g.node_id(target))) {
          target = v;
          target_score = score;
        }
      }
      if (target == pos) {
        // Only possible on a single-node graph; everything else has a
        // strictly positive score elsewhere.
        joint[r] = AgentAction::Wait(1);
      } else {
        joint[r] = MoveToward(g, pos, target);
      }
    }
    return joint;
  }
};

class RandomPolicyInstance : public PolicyInstance {
 public:
  explicit RandomPolicyInstance(std::uint64_t seed) : rng_(seed) {}
  std::vector<AgentAction> Decide(const MonitorGraph& g, const MdpConfig& cfg,
                                  const EventState& s) override {
    std::vector<AgentAction> joint(s.poses.size(), AgentAction::Noop());
    for (size_t r = 0; r < s.poses.size(); ++r) {
      if (!s.poses[r].ready()) continue;
      std::vector<AgentAction> actions =
          LegalActions(g, cfg, s, static_cast<int>(r));
      std::uniform_int_distribution<size_t> dist(0, actions.size() - 1);
      joint[r] = actions[dist(rng_)];
    }
    return joint;
  }

 private:
  std::mt19937_64 rng_;
};

class RandomPolicy : public Policy {
 public:
  std::string name() const override { return "random"; }
  std::unique_ptr<PolicyInstance> Instantiate(std::uint64_t seed) const override {
    return std::make_unique<RandomPolicyInstance>(seed);
  }
};

}  // namespace

std::unique_ptr<Policy> MakeGreedyLatencyPolicy(const MonitorGraph&) {
  return std::make_unique<GreedyLatencyPolicy>();
}

std::unique_ptr<Policy> MakeRandomPolicy() {
  return std::make_unique<RandomPolicy>();
}

RolloutResult RunRollout(const MonitorGraph& g, const MdpConfig& cfg,
                         PolicyInstance& policy,
                         const std::vector<RobotPose>& p0,
                         const Rational& horizon) {
  if (horizon < 0) throw Error("negative horizon");
  RolloutResult out;
  out.log.num_nodes = g.num_nodes();
  out.log.initial_poses = p0;
  EventState s = MdpReset(g, p0, cfg);
  while (s.clock < horizon) {
    std::vector<AgentAction> joint = policy.Decide(g, cfg, s);
    Rational cap = horizon - s.clock;
    EventRecord rec;
    rec.t = s.clock;
    rec.latencies = s.latencies;
    TransitionResult tr = MdpTransition(g, cfg, s, joint, cap);
    rec.poses = tr.poses_during;
    rec.action = tr.commands;
    rec.dt = tr.dt;
    out.log.records.push_back(std::move(rec));
    out.rollout.steps.push_back(
        {joint, tr.dt, tr.state.z, tr.state.clock});
    s = std::move(tr.state);
  }
  out.log.end_time = s.clock;
  out.log.final_latencies = s.latencies;
  out.log.final_poses = s.poses;
  out.final_state = s;
  return out;
}

}  // namespace mb
