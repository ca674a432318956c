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

#include "monitorbench/learning.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace mb {

GaeResult TransGae(const AgentBatch& batch) {
  const size_t n = batch.rewards.size();
  if (batch.values.size() != n || batch.active.size() != n ||
      (!batch.dts.empty() && batch.dts.size() != n)) {
    throw Error("malformed rollout batch");
  }
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);

  double next_advantage = 0.0;
  size_t next_active = n;
  for (size_t idx = n; idx-- > 0;) {
    if (!batch.active[idx]) continue;
    const size_t fold = next_active - idx - 1;  // inactive steps folded in
    double delta = -batch.values[idx];
    double disc = 1.0;
    for (size_t j = 0; j <= fold; ++j) {
      delta += disc * batch.rewards[idx + j];
      disc *= batch.gamma;
    }
    double bootstrap = (next_active < n)
                           ? batch.values[next_active]
                           : (batch.terminal ? 0.0 : batch.final_value);
    delta += disc * bootstrap;
    double gl = std::pow(batch.gamma * batch.lambda,
                         static_cast<double>(fold + 1));
    out.advantages[idx] = delta + gl * next_advantage;
    out.returns[idx] = out.advantages[idx] + batch.values[idx];
    next_advantage = out.advantages[idx];
    next_active = idx;
  }
  return out;
}

std::vector<double> DiscountedReturns(const std::vector<double>& rewards,
                                      double gamma) {
  std::vector<double> g(rewards.size(), 0.0);
  double acc = 0.0;
  for (size_t i = rewards.size(); i-- > 0;) {
    acc = rewards[i] + gamma * acc;
    g[i] = acc;
  }
  return g;
}

namespace {

std::string StateSnapshot(const MonitorGraph& g, const EventState& s) {
  std::ostringstream os;
  for (const RobotPose& p : s.poses) {
    os << g.node_id(p.from) << ">" << g.node_id(p.to) << "@"
       << FormatRatio(p.remaining) << ";";
  }
  os << "L=";
  for (const Rational& l : s.latencies) os << FormatRatio(l) << ",";
  os << "z=" << FormatRatio(s.z);
  return os.str();
}

}  // namespace

DemoDataset BuildDemoDataset(const MonitorGraph& g, const MdpConfig& cfg,
                             const Policy& policy,
                             const std::vector<RobotPose>& p0, int episodes,
                             const Rational& horizon, double gamma,
                             std::uint64_t seed) {
  const int k = static_cast<int>(p0.size());
  DemoDataset dataset;
  dataset.gamma = gamma;
  GpeTable gpe;
  if (g.num_nodes() > 1) {
    gpe = LaplacianGpe(g, std::min(4, g.num_nodes() - 1));
  } else {
    gpe.coords.assign(1, {0.0});
    gpe.eigenvalues = {0.0};
  }
  ObservationNormalizers norms;
  RunningNormalizer return_stats;

  for (int ep = 0; ep < episodes; ++ep) {
    auto instance = policy.Instantiate(seed + static_cast<std::uint64_t>(ep));
    EventState s = MdpReset(g, p0, cfg);
    // Per-agent per-step rewards plus tuples awaiting their returns.
    std::vector<std::vector<double>> rewards(k);
    std::vector<std::vector<std::pair<size_t, size_t>>> pending(k);
    int step = 0;
    while (s.clock < horizon) {
      std::vector<AgentAction> joint = instance->Decide(g, cfg, s);
      std::vector<std::vector<double>> obs =
          Observe(g, cfg, s, gpe, norms, /*update_stats=*/true);
      for (int r = 0; r < k; ++r) {
        if (!s.poses[r].ready()) {
          rewards[r].push_back(0.0);
          continue;
        }
        CounterfactualResult cf = CounterfactualRewards(g, cfg, s, joint, r);
        double reward = ToDouble(cf.combined);
        rewards[r].push_back(reward);
        std::vector<AgentAction> legal = LegalActions(g, cfg, s, r);
        int action_index = -1;
        for (size_t i = 0; i < legal.size(); ++i) {
          if (legal[i] == joint[r]) action_index = static_cast<int>(i);
        }
        if (action_index < 0) throw Error("policy action outside legal set");
        DemoTuple tup;
        tup.episode = ep;
        tup.step = step;
        tup.agent = r;
        tup.observation = obs[r];
        tup.state = StateSnapshot(g, s);
        tup.action_index = action_index;
        tup.mask.assign(legal.size(), 1);
        tup.reward = reward;
        pending[r].push_back(
            {dataset.tuples.size(), rewards[r].size() - 1});
        dataset.tuples.push_back(std::move(tup));
      }
      TransitionResult tr = MdpTransition(g, cfg, s, joint, horizon - s.clock);
      s = std::move(tr.state);
      ++step;
    }
    for (int r = 0; r < k; ++r) {
      std::vector<double> returns = DiscountedReturns(rewards[r], gamma);
      for (const auto& [tuple_idx, step_idx] : pending[r]) {
        dataset.tuples[tuple_idx].raw_return = returns[step_idx];
        return_stats.Update(returns[step_idx]);
      }
    }
  }
  dataset.mean_return = return_stats.Mean();
  dataset.std_return = return_stats.Std();
  for (DemoTuple& tup : dataset.tuples) {
    tup.normalized_return =
        (tup.raw_return - dataset.mean_return) / (dataset.std_return + dataset.eps);
  }
  return dataset;
}

void WriteDemoDataset(const DemoDataset& dataset, std::ostream& out) {
  nlohmann::json header;
  header["gamma"] = dataset.gamma;
  header["mean_return"] = dataset.mean_return;
  header["std_return"] = dataset.std_return;
  header["eps"] = dataset.eps;
  out << header.dump() << "\n";
  for (const DemoTuple& tup : dataset.tuples) {
    nlohmann::json j;
    j["episode"] = tup.episode;
    j["step"] = tup.step;
    j["agent"] = tup.agent;
    j["observation"] = tup.observation;
    j["state"] = tup.state;
    j["action"] = tup.action_index;
    j["mask"] = tup.mask;
    j["reward"] = tup.reward;
    j["return"] = tup.raw_return;
    j["normalized_return"] = tup.normalized_return;
    out << j.dump() << "\n";
  }
}

std::vector<std::vector<AgentAction>> JointActions(const MonitorGraph& g,
                                                   const MdpConfig& cfg,
                                                   const EventState& s) {
  const int k = static_cast<int>(s.poses.size());
  std::vector<std::vector<AgentAction>> per_robot(k);
  for (int r = 0; r < k; ++r) per_robot[r] = LegalActions(g, cfg, s, r);
  std::vector<std::vector<AgentAction>> joints{{}};
  for (int r = 0; r < k; ++r) {
    std::vector<std::vector<AgentAction>> next;
    for (const auto& partial : joints) {
      for (const AgentAction& a : per_robot[r]) {
        std::vector<AgentAction> ext = partial;
        ext.push_back(a);
        next.push_back(std::move(ext));
      }
    }
    joints = std::move(next);
  }
  return joints;
}

namespace {

long long Bucket(const Rational& x, const Rational& width, const Rational& cap) {
  if (x > cap) return -1;  // overflow bucket
  Rational q = x / width;
  BigInt fl = numerator(q) / denominator(q);
  return fl.convert_to<long long>();
}

}  // namespace

std::string QStateKey(const MonitorGraph& g, const MdpConfig& cfg,
                      const EventState& s) {
  Rational cap = 2 * TspTour(g).length * g.w_max() / g.w_min();
  std::ostringstream os;
  for (const RobotPose& p : s.poses) {
    os << p.from << ">" << p.to << "@"
       << Bucket(p.remaining, cfg.delta, cap) << "|";
  }
  os << "L";
  for (const Rational& l : s.latencies) {
    os << Bucket(l, cfg.delta, cap) << ",";
  }
  os << "z" << Bucket(s.z, cfg.delta, cap);
  return os.str();
}

namespace {

class CachedKeyer {
 public:
  CachedKeyer(const MonitorGraph& g, const MdpConfig& cfg)
      : delta_(cfg.delta), cap_(2 * TspTour(g).length * g.w_max() / g.w_min()) {}

  std::string operator()(const EventState& s) const {
    std::ostringstream os;
    for (const RobotPose& p : s.poses) {
      os << p.from << ">" << p.to << "@" << Bucket(p.remaining, delta_, cap_)
         << "|";
    }
    os << "L";
    for (const Rational& l : s.latencies) {
      os << Bucket(l, delta_, cap_) << ",";
    }
    os << "z" << Bucket(s.z, delta_, cap_);
    return os.str();
  }

 private:
  Rational delta_;
  Rational cap_;
};

class QGreedyInstance : public PolicyInstance {
 public:
  QGreedyInstance(std::shared_ptr<QTable> table, CachedKeyer keyer)
      : table_(std::move(table)), keyer_(std::move(keyer)) {}

  std::vector<AgentAction> Decide(const MonitorGraph& g, const MdpConfig& cfg,
                                  const EventState& s) override {
    std::vector<std::vector<AgentAction>> joints = JointActions(g, cfg, s);
    auto it = table_->find(keyer_(s));
    size_t pick = 0;
    if (it != table_->end() && it->second.size() == joints.size()) {
      for (size_t i = 1; i < joints.size(); ++i) {
        if (it->second[i] > it->second[pick]) pick = i;
      }
    }
    return joints[pick];
  }

 private:
  std::shared_ptr<QTable> table_;
  CachedKeyer keyer_;
};

class QGreedyPolicy : public Policy {
 public:
  QGreedyPolicy(const MonitorGraph& g, const MdpConfig& cfg,
                std::shared_ptr<QTable> table)
      : table_(std::move(table)), keyer_(g, cfg) {}
  std::string name() const override { return "q_greedy"; }
  std::unique_ptr<PolicyInstance> Instantiate(std::uint64_t) const override {
    return std::make_unique<QGreedyInstance>(table_, keyer_);
  }

 private:
  std::shared_ptr<QTable> table_;
  CachedKeyer keyer_;
};

}  // namespace

std::unique_ptr<Policy> MakeQGreedyPolicy(const MonitorGraph& g,
                                          const MdpConfig& cfg,
                                          std::shared_ptr<QTable> table) {
  return std::make_unique<QGreedyPolicy>(g, cfg, std::move(table));
}

QLearnResult SmdpQLearn(const MonitorGraph& g, const MdpConfig& cfg,
                        const std::vector<RobotPose>& p0, const QConfig& qcfg,
                        std::uint64_t seed) {
  if (!cfg.T) throw Error("T = +inf is rejected for learning runs");
  auto table = std::make_shared<QTable>();
  CachedKeyer keyer(g, cfg);
  std::mt19937_64 rng(seed);

  QLearnResult result;
  result.table = table;

  EventState s = MdpReset(g, p0, cfg);
  std::int64_t updates = 0;
  std::int64_t episode_event = 0;

  // Pending decision epoch: reward and discount accumulated over events
  // without ready robots are folded into the previous decision's update.
  bool has_pending = false;
  std::string pending_key;
  size_t pending_action = 0;
  double pending_reward = 0.0;
  double pending_discount = 1.0;

  auto ensure_entry = [&](const std::string& key, size_t num_actions)
      -> std::vector<double>& {
    auto [it, inserted] = table->try_emplace(key);
    if (inserted) {
      if (table->size() > qcfg.max_keys) {
        throw Error("q-learning state-key cap exceeded; coarsen the bucketing");
      }
      it->second.assign(num_actions, 0.0);
    }
    return it->second;
  };

  auto finalize = [&](const std::string& next_key, double next_max) {
    if (!has_pending) return;
    auto it = table->find(pending_key);
    double& q = it->second[pending_action];
    q += qcfg.alpha * (pending_reward + pending_discount * next_max - q);
    ++updates;
    has_pending = false;
    (void)next_key;
  };

  while (updates < qcfg.budget) {
    bool any_ready = false;
    for (const RobotPose& p : s.poses) any_ready |= p.ready();

    std::vector<AgentAction> joint;
    if (any_ready) {
      std::vector<std::vector<AgentAction>> joints = JointActions(g, cfg, s);
      std::string key = keyer(s);
      std::vector<double>& qvals = ensure_entry(key, joints.size());
      double best = *std::max_element(qvals.begin(), qvals.end());
      finalize(key, best);

      double frac = static_cast<double>(updates) /
                    static_cast<double>(std::max<std::int64_t>(1, qcfg.budget));
      double eps = qcfg.eps_start + (qcfg.eps_end - qcfg.eps_start) * frac;
      size_t pick;
      if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < eps) {
        pick = std::uniform_int_distribution<size_t>(0, joints.size() - 1)(rng);
      } else {
        pick = 0;
        for (size_t i = 1; i < qvals.size(); ++i) {
          if (qvals[i] > qvals[pick]) pick = i;
        }
      }
      joint = joints[pick];
      has_pending = true;
      pending_key = key;
      pending_action = pick;
      pending_reward = 0.0;
      pending_discount = 1.0;
    } else {
      joint.assign(s.poses.size(), AgentAction::Noop());
    }

    TransitionResult tr = MdpTransition(g, cfg, s, joint);
    double r = -ToDouble(tr.state.z * tr.dt);
    double step_disc = std::pow(qcfg.gamma, ToDouble(tr.dt));
    if (has_pending) {
      pending_reward += pending_discount * r;
      pending_discount *= step_disc;
    }
    s = std::move(tr.state);

    if (++episode_event >= qcfg.episode_events) {
      if (has_pending) {
        bool ready_next = false;
        for (const RobotPose& p : s.poses) ready_next |= p.ready();
        double boot = 0.0;
        if (ready_next) {
          std::vector<std::vector<AgentAction>> joints = JointActions(g, cfg, s);
          std::vector<double>& qvals = ensure_entry(keyer(s), joints.size());
          boot = *std::max_element(qvals.begin(), qvals.end());
        }
        finalize("", boot);
      }
      s = MdpReset(g, p0, cfg);
      episode_event = 0;
      has_pending = false;
    }
  }

  result.updates = updates;
  result.greedy = MakeQGreedyPolicy(g, cfg, table);
  return result;
}

}  // namespace mb
