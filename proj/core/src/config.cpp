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

#include "monitorbench/config.hpp"

#include <filesystem>
#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <string>

#include "json.hpp"

namespace mb {
namespace {

using nlohmann::json;

void CheckKeys(const json& j, const std::string& ctx,
               std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw Error("config: " + ctx + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* a : allowed) {
      if (it.key() == a) {
        known = true;
        break;
      }
    }
    if (!known) throw Error("config: unknown key '" + it.key() + "' in " + ctx);
  }
}

Rational AsRational(const json& j, const std::string& ctx) {
  try {
    if (j.is_string()) return ParseRational(j.get<std::string>());
    if (j.is_number()) return ParseRational(j.dump());
  } catch (const Error& e) {
    throw Error("config: " + ctx + ": " + e.what());
  }
  throw Error("config: " + ctx + " must be a number or a numeric string");
}

int AsInt(const json& j, const std::string& ctx) {
  if (!j.is_number_integer()) throw Error("config: " + ctx + " must be an integer");
  return j.get<int>();
}

RobotPose ParsePose(const json& j, const MonitorGraph& g,
                    const std::string& ctx) {
  if (j.is_string()) {
    return RobotPose::At(g.node_index(j.get<std::string>()));
  }
  CheckKeys(j, ctx, {"from", "to", "remaining"});
  if (!j.contains("from") || !j.contains("to") || !j.contains("remaining")) {
    throw Error("config: " + ctx + " needs from/to/remaining");
  }
  RobotPose p;
  p.from = g.node_index(j.at("from").get<std::string>());
  p.to = g.node_index(j.at("to").get<std::string>());
  p.remaining = AsRational(j.at("remaining"), ctx + ".remaining");
  if (p.remaining < 0) throw Error("config: " + ctx + ".remaining < 0");
  if (p.from != p.to) {
    auto e = g.edge_between(p.from, p.to);
    if (!e) throw Error("config: " + ctx + " is not on an edge");
    if (p.remaining > g.edge(*e).length) {
      throw Error("config: " + ctx + ".remaining exceeds the edge length");
    }
  }
  return p;
}

std::vector<Segment> ParseSegments(const json& j, const MonitorGraph& g,
                                   const std::string& ctx) {
  if (!j.is_array()) throw Error("config: " + ctx + " must be an array");
  std::vector<Segment> out;
  for (const auto& s : j) {
    CheckKeys(s, ctx + "[]", {"traverse", "wait"});
    if (s.contains("traverse") == s.contains("wait")) {
      throw Error("config: " + ctx + "[] needs exactly one of traverse/wait");
    }
    if (s.contains("traverse")) {
      out.push_back(
          Segment::Traverse(g.node_index(s.at("traverse").get<std::string>())));
    } else {
      Rational w = AsRational(s.at("wait"), ctx + "[].wait");
      if (w <= 0) throw Error("config: " + ctx + "[].wait must be positive");
      out.push_back(Segment::Wait(std::move(w)));
    }
  }
  return out;
}

}  // namespace

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(std::string("config: invalid JSON: ") + e.what());
  }

  CheckKeys(j, "config",
            {"schema", "graph", "robots", "policy", "mdp", "horizon",
             "repetitions", "seed", "output", "oracle", "learn", "verify"});
  ExperimentConfig cfg;
  if (!j.contains("schema") || AsInt(j.at("schema"), "schema") != 1) {
    throw Error("config: missing or unsupported schema version (expected 1)");
  }
  if (!j.contains("graph")) throw Error("config: missing graph path");
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  std::filesystem::path gp = j.at("graph").get<std::string>();
  if (gp.is_relative()) gp = base / gp;
  cfg.graph_path = gp.string();
  MonitorGraph g = LoadGraph(cfg.graph_path);

  if (j.contains("robots")) {
    const json& r = j.at("robots");
    CheckKeys(r, "robots", {"k", "p0"});
    if (r.contains("p0")) {
      if (!r.at("p0").is_array()) throw Error("config: robots.p0 must be an array");
      int i = 0;
      for (const auto& p : r.at("p0")) {
        cfg.p0.push_back(ParsePose(p, g, "robots.p0[" + std::to_string(i++) + "]"));
      }
    }
    if (r.contains("k")) {
      cfg.k = AsInt(r.at("k"), "robots.k");
      if (!cfg.p0.empty() && cfg.k != static_cast<int>(cfg.p0.size())) {
        throw Error("config: robots.k disagrees with robots.p0 length");
      }
    } else {
      cfg.k = static_cast<int>(cfg.p0.size());
    }
  }
  if (cfg.k <= 0) throw Error("config: robot count must be positive");
  if (cfg.p0.empty()) {
    cfg.p0.assign(cfg.k, RobotPose::At(0));
  }

  if (j.contains("policy")) {
    const json& p = j.at("policy");
    CheckKeys(p, "policy", {"name", "plan"});
    if (p.contains("name")) cfg.policy.name = p.at("name").get<std::string>();
    const std::vector<std::string> known = {"tsp_cycle", "partition",
                                            "greedy_latency", "random",
                                            "scripted"};
    if (std::find(known.begin(), known.end(), cfg.policy.name) == known.end()) {
      throw Error("config: unknown policy '" + cfg.policy.name + "'");
    }
    if (cfg.policy.name == "scripted") {
      if (!p.contains("plan")) throw Error("config: scripted policy needs a plan");
      const json& plan = p.at("plan");
      CheckKeys(plan, "policy.plan", {"robots"});
      if (!plan.contains("robots") || !plan.at("robots").is_array()) {
        throw Error("config: policy.plan.robots must be an array");
      }
      int i = 0;
      for (const auto& rp : plan.at("robots")) {
        const std::string ctx = "policy.plan.robots[" + std::to_string(i++) + "]";
        CheckKeys(rp, ctx, {"prefix", "cycle"});
        RobotPlan out;
        if (rp.contains("prefix")) {
          out.prefix = ParseSegments(rp.at("prefix"), g, ctx + ".prefix");
        }
        if (rp.contains("cycle")) {
          out.cycle = ParseSegments(rp.at("cycle"), g, ctx + ".cycle");
        }
        cfg.policy.plan.robots.push_back(std::move(out));
      }
      if (static_cast<int>(cfg.policy.plan.robots.size()) != cfg.k) {
        throw Error("config: scripted plan must list one program per robot");
      }
    } else if (p.contains("plan")) {
      throw Error("config: only scripted policies take a plan");
    }
  }

  if (j.contains("mdp")) {
    const json& m = j.at("mdp");
    CheckKeys(m, "mdp", {"T", "delta", "kappa_max", "lambda_L", "lambda_z"});
    if (m.contains("T")) {
      if (m.at("T").is_null() ||
          (m.at("T").is_string() && m.at("T").get<std::string>() == "inf")) {
        cfg.mdp.T.reset();
      } else {
        cfg.mdp.T = AsRational(m.at("T"), "mdp.T");
      }
    }
    if (m.contains("delta")) cfg.mdp.delta = AsRational(m.at("delta"), "mdp.delta");
    if (m.contains("kappa_max")) cfg.mdp.kappa_max = AsInt(m.at("kappa_max"), "mdp.kappa_max");
    if (m.contains("lambda_L")) cfg.mdp.lambda_L = AsRational(m.at("lambda_L"), "mdp.lambda_L");
    if (m.contains("lambda_z")) cfg.mdp.lambda_z = AsRational(m.at("lambda_z"), "mdp.lambda_z");
  }
  try {
    cfg.mdp.Validate();
  } catch (const Error& e) {
    throw Error(std::string("config: ") + e.what());
  }

  if (j.contains("horizon")) cfg.horizon = AsRational(j.at("horizon"), "horizon");
  if (cfg.horizon < 0) throw Error("config: horizon must be non-negative");
  if (j.contains("repetitions")) {
    cfg.repetitions = AsInt(j.at("repetitions"), "repetitions");
    if (cfg.repetitions < 0) throw Error("config: repetitions must be >= 0");
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) {
      throw Error("config: seed must be a non-negative integer");
    }
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("output")) cfg.output_dir = j.at("output").get<std::string>();

  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    CheckKeys(o, "oracle", {"latency_cap", "incumbent", "max_depth", "max_nodes"});
    if (o.contains("latency_cap")) {
      cfg.oracle.latency_cap = AsRational(o.at("latency_cap"), "oracle.latency_cap");
    }
    if (o.contains("incumbent")) {
      cfg.oracle.incumbent = AsRational(o.at("incumbent"), "oracle.incumbent");
    }
    if (o.contains("max_depth")) cfg.oracle.max_depth = AsInt(o.at("max_depth"), "oracle.max_depth");
    if (o.contains("max_nodes")) {
      if (!o.at("max_nodes").is_number_integer()) {
        throw Error("config: oracle.max_nodes must be an integer");
      }
      cfg.oracle.max_nodes = o.at("max_nodes").get<std::int64_t>();
    }
  }

  if (j.contains("learn")) {
    const json& l = j.at("learn");
    CheckKeys(l, "learn",
              {"gamma", "alpha", "eps_start", "eps_end", "budget",
               "episode_events", "max_keys"});
    auto num = [&](const char* key, double& out) {
      if (l.contains(key)) {
        if (!l.at(key).is_number()) {
          throw Error(std::string("config: learn.") + key + " must be a number");
        }
        out = l.at(key).get<double>();
      }
    };
    num("gamma", cfg.learn.gamma);
    num("alpha", cfg.learn.alpha);
    num("eps_start", cfg.learn.eps_start);
    num("eps_end", cfg.learn.eps_end);
    if (l.contains("budget")) cfg.learn.budget = l.at("budget").get<std::int64_t>();
    if (l.contains("episode_events")) {
      cfg.learn.episode_events = l.at("episode_events").get<std::int64_t>();
    }
    if (l.contains("max_keys")) cfg.learn.max_keys = l.at("max_keys").get<std::size_t>();
  }

  if (j.contains("verify")) {
    const json& v = j.at("verify");
    CheckKeys(v, "verify", {"delta_ref"});
    if (v.contains("delta_ref")) {
      cfg.verify.delta_ref = AsRational(v.at("delta_ref"), "verify.delta_ref");
    }
  }
  return cfg;
}

MonitorGraph LoadConfigGraph(const ExperimentConfig& cfg) {
  return LoadGraph(cfg.graph_path);
}

std::unique_ptr<Policy> MakePolicy(const MonitorGraph& g,
                                   const ExperimentConfig& cfg) {
  const std::string& name = cfg.policy.name;
  if (name == "tsp_cycle") return MakeTspCyclePolicy(g, cfg.k, cfg.p0);
  if (name == "partition") return MakePartitionPolicy(g, cfg.k, cfg.p0);
  if (name == "greedy_latency") return MakeGreedyLatencyPolicy(g);
  if (name == "random") return MakeRandomPolicy();
  if (name == "scripted") {
    throw Error("config: scripted plans run through the plan executor");
  }
  throw Error("config: unknown policy '" + name + "'");
}

}  // namespace mb
