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

#include "monitorbench/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace mb {

void MdpConfig::Validate() const {
  if (delta <= 0) throw Error("delta must be positive");
  if (kappa_max < 1) throw Error("kappa_max must be positive");
  if (lambda_L < 0 || lambda_z < 0) throw Error("negative lambda");
  if (T && *T < 0) throw Error("negative T");
}

EventState MdpReset(const MonitorGraph& g, const std::vector<RobotPose>& p0,
                    const MdpConfig& cfg) {
  cfg.Validate();
  WorldState ws = WorldReset(g, p0);
  EventState s;
  s.poses = std::move(ws.poses);
  s.latencies = std::move(ws.latencies);
  s.z = 0;
  s.eta = 0;
  s.clock = 0;
  s.arrived_at.assign(p0.size(), Rational(0));
  return s;
}

EventState MdpReset(const MonitorGraph& g, const std::vector<int>& p0_nodes,
                    const MdpConfig& cfg) {
  std::vector<RobotPose> poses;
  for (int v : p0_nodes) poses.push_back(RobotPose::At(v));
  return MdpReset(g, poses, cfg);
}

std::vector<AgentAction> LegalActions(const MonitorGraph& g,
                                      const MdpConfig& cfg,
                                      const EventState& s, int robot) {
  if (robot < 0 || robot >= static_cast<int>(s.poses.size())) {
    throw Error("robot index out of range");
  }
  if (!s.poses[robot].ready()) return {AgentAction::Noop()};
  std::vector<AgentAction> actions;
  for (int v : g.neighbors(s.poses[robot].to)) {
    actions.push_back(AgentAction::Move(v));
  }
  for (int m = 1; m <= cfg.kappa_max; ++m) {
    actions.push_back(AgentAction::Wait(m));
  }
  return actions;
}

namespace {

// -1 = no phantom. The phantom robot is held in place with its visits and
// arrival events removed while the event timing of the other robots (plus
// the external cap) is preserved.
TransitionResult TransitionCore(const MonitorGraph& g, const MdpConfig& cfg,
                                const EventState& s,
                                const std::vector<AgentAction>& joint,
                                const std::optional<Rational>& dt_cap,
                                int phantom) {
  if (joint.size() != s.poses.size()) throw Error("joint action size mismatch");
  const int k = static_cast<int>(s.poses.size());

  TransitionResult out;
  out.state = s;
  out.commands.assign(k, std::nullopt);
  std::vector<RobotPose>& poses = out.state.poses;

  for (int r = 0; r < k; ++r) {
    const AgentAction& a = joint[r];
    if (!poses[r].ready()) {
      if (a.kind != AgentAction::kNoop) throw Error("action for a busy robot");
      continue;
    }
    if (r == phantom) continue;
    switch (a.kind) {
      case AgentAction::kNoop:
        throw Error("no-op for a ready robot");
      case AgentAction::kMove: {
        auto e = g.edge_between(poses[r].to, a.target);
        if (!e) throw Error("move target not adjacent");
        out.commands[r] = Command::Move(a.target);
        poses[r] = RobotPose{poses[r].to, a.target, g.edge(*e).length};
        break;
      }
      case AgentAction::kWait: {
        if (a.multiples < 1 || a.multiples > cfg.kappa_max) {
          throw Error("wait multiple outside discretized set");
        }
        Rational d = cfg.delta * a.multiples;
        out.commands[r] = Command::Wait(d);
        poses[r] = RobotPose{poses[r].to, poses[r].to, d};
        break;
      }
    }
  }

  std::optional<Rational> dt;
  for (int r = 0; r < k; ++r) {
    if (r == phantom) continue;
    if (poses[r].remaining > 0 && (!dt || poses[r].remaining < *dt)) {
      dt = poses[r].remaining;
    }
  }
  if (cfg.T && s.eta < *cfg.T) {
    Rational to_T = *cfg.T - s.eta;
    if (!dt || to_T < *dt) dt = to_T;
  }
  if (dt_cap && (!dt || *dt_cap < *dt)) dt = *dt_cap;
  if (!dt) throw Error("no pending events in transition");
  if (*dt <= 0) throw Error("nonpositive event interval");
  out.dt = *dt;
  out.poses_during = poses;

  std::set<int> visited;
  for (int r = 0; r < k; ++r) {
    RobotPose& pose = poses[r];
    bool counts = (r != phantom);
    if (pose.stationary() && counts) visited.insert(pose.to);
    if (pose.remaining > 0) {
      if (pose.remaining == *dt) {
        if (!pose.stationary()) {
          if (counts) visited.insert(pose.to);
          out.state.arrived_at[r] = s.clock + *dt;
        }
        pose = RobotPose::At(pose.to);
      } else {
        pose.remaining -= *dt;
      }
    }
  }

  // Right-limit supremum of M over (t, t+dt]: nodes occupied by a stationary
  // (counting) robot contribute 0, all others their latency at the right end.
  Rational interval_sup = 0;
  std::vector<char> occupied(g.num_nodes(), 0);
  for (int r = 0; r < k; ++r) {
    if (r != phantom && out.poses_during[r].stationary()) {
      occupied[out.poses_during[r].to] = 1;
    }
  }
  for (int v = 0; v < g.num_nodes(); ++v) {
    if (visited.count(v)) {
      out.state.latencies[v] = 0;
    } else {
      out.state.latencies[v] += *dt;
    }
    if (!occupied[v]) {
      Rational c = g.weight(v) * (s.latencies[v] + *dt);
      if (c > interval_sup) interval_sup = c;
    }
  }
  out.state.clock = s.clock + *dt;

  if (cfg.T) {
    out.state.eta = std::min(s.eta + *dt, *cfg.T);
    if (out.state.eta == *cfg.T) {
      if (s.eta < *cfg.T) {
        // Activation event: the tracker starts from the point value M(T),
        // computed after the resets at T.
        Rational m = 0;
        for (int v = 0; v < g.num_nodes(); ++v) {
          Rational c = g.weight(v) * out.state.latencies[v];
          if (c > m) m = c;
        }
        out.state.z = m;
      } else {
        out.state.z = std::max(s.z, interval_sup);
      }
    } else {
      out.state.z = 0;
    }
  } else {
    out.state.eta = s.eta + *dt;
    out.state.z = 0;
  }
  return out;
}

}  // namespace

TransitionResult MdpTransition(const MonitorGraph& g, const MdpConfig& cfg,
                               const EventState& s,
                               const std::vector<AgentAction>& joint,
                               const std::optional<Rational>& dt_cap) {
  return TransitionCore(g, cfg, s, joint, dt_cap, /*phantom=*/-1);
}

Rational AverageRewardEstimate(const MdpRollout& rollout, AverageMode mode) {
  if (rollout.steps.empty()) return 0;
  if (mode == AverageMode::kStep) {
    Rational sum = 0;
    for (const MdpStep& st : rollout.steps) sum += st.z_after;
    return sum / Rational(static_cast<long long>(rollout.steps.size()));
  }
  Rational num = 0, den = 0;
  for (const MdpStep& st : rollout.steps) {
    num += st.z_after * st.dt;
    den += st.dt;
  }
  return den == 0 ? Rational(0) : num / den;
}

CounterfactualResult CounterfactualRewards(const MonitorGraph& g,
                                           const MdpConfig& cfg,
                                           const EventState& s,
                                           const std::vector<AgentAction>& joint,
                                           int robot) {
  if (robot < 0 || robot >= static_cast<int>(s.poses.size())) {
    throw Error("robot index out of range");
  }
  if (!s.poses[robot].ready()) throw Error("counterfactual for a busy robot");
  TransitionResult factual = TransitionCore(g, cfg, s, joint, std::nullopt, -1);
  TransitionResult cf = TransitionCore(g, cfg, s, joint, factual.dt, robot);
  CounterfactualResult res;
  for (int v = 0; v < g.num_nodes(); ++v) {
    res.r_l += g.weight(v) * (cf.state.latencies[v] - factual.state.latencies[v]);
  }
  res.r_z = cf.state.z - factual.state.z;
  res.combined = cfg.lambda_L * res.r_l + cfg.lambda_z * res.r_z;
  return res;
}

std::vector<int> RoleLabels(const EventState& s) {
  const int k = static_cast<int>(s.poses.size());
  std::vector<int> labels(k, 0);
  std::vector<std::vector<int>> by_node;
  std::vector<int> nodes;
  for (int r = 0; r < k; ++r) {
    if (!s.poses[r].ready()) continue;
    int node = s.poses[r].to;
    auto it = std::find(nodes.begin(), nodes.end(), node);
    if (it == nodes.end()) {
      nodes.push_back(node);
      by_node.push_back({r});
    } else {
      by_node[it - nodes.begin()].push_back(r);
    }
  }
  for (auto& group : by_node) {
    std::sort(group.begin(), group.end(), [&](int a, int b) {
      if (s.arrived_at[a] != s.arrived_at[b]) {
        return s.arrived_at[a] < s.arrived_at[b];
      }
      return a < b;
    });
    for (size_t i = 0; i < group.size(); ++i) {
      labels[group[i]] = static_cast<int>(i) + 1;
    }
  }
  return labels;
}

std::vector<std::vector<double>> Observe(const MonitorGraph& g,
                                         const MdpConfig& cfg,
                                         const EventState& s,
                                         const GpeTable& gpe,
                                         ObservationNormalizers& norms,
                                         bool update_stats) {
  const int k = static_cast<int>(s.poses.size());
  const int n = g.num_nodes();
  if (update_stats) {
    norms.z.Update(std::log1p(ToDouble(s.z)));
    for (int v = 0; v < n; ++v) {
      norms.latency.Update(ToDouble(g.weight(v) * s.latencies[v]));
    }
    for (const RobotPose& p : s.poses) {
      norms.remaining.Update(ToDouble(p.remaining));
    }
  }

  double eta_frac;
  if (!cfg.T) {
    eta_frac = 0.0;
  } else if (*cfg.T == 0 || s.eta >= *cfg.T) {
    eta_frac = 1.0;
  } else {
    eta_frac = ToDouble(s.eta / *cfg.T);
  }
  std::vector<int> labels = RoleLabels(s);

  std::vector<std::vector<double>> features(k);
  for (int r = 0; r < k; ++r) {
    std::vector<double>& f = features[r];
    const auto& from_gpe = gpe.coords[s.poses[r].from];
    const auto& to_gpe = gpe.coords[s.poses[r].to];
    f.insert(f.end(), from_gpe.begin(), from_gpe.end());
    f.insert(f.end(), to_gpe.begin(), to_gpe.end());
    f.push_back(norms.z.Apply(std::log1p(ToDouble(s.z))));
    for (int v = 0; v < n; ++v) {
      f.push_back(norms.latency.Apply(ToDouble(g.weight(v) * s.latencies[v])));
    }
    for (const RobotPose& p : s.poses) {
      f.push_back(norms.remaining.Apply(ToDouble(p.remaining)));
    }
    f.push_back(eta_frac);
    for (const RobotPose& p : s.poses) {
      f.push_back(p.ready() ? 1.0 : 0.0);
    }
    for (int lbl = 0; lbl <= k; ++lbl) {
      f.push_back(labels[r] == lbl ? 1.0 : 0.0);
    }
  }
  return features;
}

}  // namespace mb
