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

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "monitorbench/config.hpp"
#include "monitorbench/learning.hpp"
#include "monitorbench/metrics.hpp"
#include "monitorbench/oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitVerify = 3;

json PoseJson(const mb::MonitorGraph& g, const mb::RobotPose& p) {
  if (p.stationary() && p.ready()) return g.node_id(p.from);
  return json{{"from", g.node_id(p.from)},
              {"to", g.node_id(p.to)},
              {"remaining", mb::FormatRatio(p.remaining)}};
}

json SegmentsJson(const mb::MonitorGraph& g,
                  const std::vector<mb::Segment>& segs) {
  json arr = json::array();
  for (const auto& s : segs) {
    if (s.kind == mb::Segment::kTraverse) {
      arr.push_back(json{{"traverse", g.node_id(s.node)}});
    } else {
      arr.push_back(json{{"wait", mb::FormatRatio(s.wait)}});
    }
  }
  return arr;
}

json PlanJson(const mb::MonitorGraph& g, const mb::SegmentPlan& plan) {
  json robots = json::array();
  for (const auto& r : plan.robots) {
    robots.push_back(json{{"prefix", SegmentsJson(g, r.prefix)},
                          {"cycle", SegmentsJson(g, r.cycle)}});
  }
  return json{{"robots", robots}};
}

json RationalJson(const mb::Rational& q) {
  return json{{"ratio", mb::FormatRatio(q)}, {"decimal", mb::FormatDecimal(q)}};
}

void WriteJsonFile(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw mb::Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

mb::Rational RequireFiniteT(const mb::ExperimentConfig& cfg) {
  if (!cfg.mdp.T) throw mb::Error("config: this command requires a finite mdp.T");
  return *cfg.mdp.T;
}

std::vector<mb::EventLog> RunRepetitions(const mb::MonitorGraph& g,
                                         const mb::ExperimentConfig& cfg,
                                         const mb::Policy* policy, int jobs) {
  std::vector<mb::EventLog> logs(cfg.repetitions);
  if (cfg.policy.name == "scripted") {
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      logs[rep] = mb::RunPlan(g, cfg.p0, cfg.policy.plan, cfg.horizon);
    }
    return logs;
  }
  auto run_one = [&](int rep) {
    auto instance = policy->Instantiate(cfg.seed + static_cast<std::uint64_t>(rep));
    logs[rep] = mb::RunRollout(g, cfg.mdp, *instance, cfg.p0, cfg.horizon).log;
  };
  const int workers = std::max(1, std::min(jobs, cfg.repetitions));
  if (workers == 1) {
    for (int rep = 0; rep < cfg.repetitions; ++rep) run_one(rep);
    return logs;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int rep = next.fetch_add(1); rep < cfg.repetitions;
           rep = next.fetch_add(1)) {
        run_one(rep);
      }
    });
  }
  for (auto& t : pool) t.join();
  return logs;
}

int CmdSimulate(const mb::ExperimentConfig& cfg, int jobs) {
  mb::MonitorGraph g = mb::LoadConfigGraph(cfg);
  fs::create_directories(cfg.output_dir);
  const mb::Rational T = cfg.mdp.T.value_or(mb::Rational(0));

  std::unique_ptr<mb::Policy> policy;
  if (cfg.policy.name != "scripted") policy = mb::MakePolicy(g, cfg);
  std::vector<mb::EventLog> logs = RunRepetitions(g, cfg, policy.get(), jobs);

  json tails = json::array();
  mb::Rational sum = 0;
  mb::Rational max_tail = 0;
  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    const std::string tag = std::to_string(rep);
    {
      std::ofstream out(fs::path(cfg.output_dir) / ("events_" + tag + ".jsonl"));
      mb::WriteEventLog(g, logs[rep], out);
    }
    mb::MetricsReport report = mb::ComputeMetrics(g, logs[rep], T, cfg.horizon);
    {
      std::ofstream out(fs::path(cfg.output_dir) / ("metrics_" + tag + ".csv"));
      mb::WriteMetricsCsv(report, out);
    }
    {
      std::ofstream out(fs::path(cfg.output_dir) / ("metrics_" + tag + ".json"));
      mb::WriteMetricsSummary(report, out);
    }
    tails.push_back(mb::FormatDecimal(report.tail_wi));
    sum += report.tail_wi;
    if (rep == 0 || report.tail_wi > max_tail) max_tail = report.tail_wi;
  }

  json summary{{"policy", cfg.policy.name},
               {"repetitions", cfg.repetitions},
               {"tail_wi", tails},
               {"T", mb::FormatDecimal(T)},
               {"horizon", mb::FormatDecimal(cfg.horizon)}};
  if (cfg.repetitions > 0) {
    summary["mean_tail_wi"] = mb::FormatDecimal(sum / cfg.repetitions);
    summary["max_tail_wi"] = mb::FormatDecimal(max_tail);
  }
  WriteJsonFile(fs::path(cfg.output_dir) / "summary.json", summary);
  std::cout << summary.dump(2) << '\n';
  return kExitOk;
}

int CmdOracle(const mb::ExperimentConfig& cfg) {
  mb::MonitorGraph g = mb::LoadConfigGraph(cfg);
  fs::create_directories(cfg.output_dir);
  const mb::Rational T = RequireFiniteT(cfg);
  mb::OracleResult res = mb::ExactOptimum(g, cfg.mdp, cfg.p0, T, cfg.oracle);

  json report{{"found", res.found},
              {"certified", res.certified},
              {"nodes_expanded", res.nodes_expanded}};
  if (res.found) {
    report["j_star"] = RationalJson(res.j_star);
    json initial = json::array();
    for (const auto& p : res.strategy.initial) initial.push_back(PoseJson(g, p));
    report["cycle"] = json{
        {"initial", initial},
        {"plan", PlanJson(g, res.strategy.plan)},
        {"prefix_duration", mb::FormatRatio(res.strategy.prefix_duration)},
        {"period", mb::FormatRatio(res.strategy.period)}};
  }
  WriteJsonFile(fs::path(cfg.output_dir) / "oracle.json", report);
  std::cout << report.dump(2) << '\n';
  return kExitOk;
}

int CmdLearn(const mb::ExperimentConfig& cfg) {
  mb::MonitorGraph g = mb::LoadConfigGraph(cfg);
  fs::create_directories(cfg.output_dir);
  const mb::Rational T = RequireFiniteT(cfg);

  std::int64_t updates = 0;
  std::unique_ptr<mb::Policy> policy;
  mb::QLearnResult learned;
  if (cfg.learn.budget > 0) {
    learned = mb::SmdpQLearn(g, cfg.mdp, cfg.p0, cfg.learn, cfg.seed);
    updates = learned.updates;
  } else {
    policy = mb::MakeRandomPolicy();
  }
  const mb::Policy& eval_policy = policy ? *policy : *learned.greedy;

  const int reps = std::max(1, cfg.repetitions);
  json tails = json::array();
  mb::Rational sum = 0;
  for (int rep = 0; rep < reps; ++rep) {
    auto instance =
        eval_policy.Instantiate(cfg.seed + 1000003ULL * (rep + 1));
    mb::RolloutResult rr = mb::RunRollout(g, cfg.mdp, *instance, cfg.p0, cfg.horizon);
    mb::Rational tail = mb::TailWi(g, rr.log, T, cfg.horizon);
    tails.push_back(mb::FormatDecimal(tail));
    sum += tail;
  }
  const mb::Rational mean = sum / reps;

  json report{{"policy", cfg.learn.budget > 0 ? "q_greedy" : "random"},
              {"updates", updates},
              {"tail_wi", tails},
              {"mean_tail_wi", mb::FormatDecimal(mean)}};
  if (cfg.learn.budget > 0) {
    report["q_keys"] = learned.table->size();
  }
  const fs::path oracle_path = fs::path(cfg.output_dir) / "oracle.json";
  if (fs::exists(oracle_path)) {
    std::ifstream in(oracle_path);
    json oracle_report;
    in >> oracle_report;
    if (oracle_report.contains("j_star")) {
      mb::Rational j =
          mb::ParseRational(oracle_report["j_star"]["ratio"].get<std::string>());
      if (j > 0) {
        report["oracle_j_star"] = RationalJson(j);
        report["gap"] = mb::FormatDecimal((mean - j) / j, 6);
      }
    }
  }
  WriteJsonFile(fs::path(cfg.output_dir) / "learn.json", report);
  std::cout << report.dump(2) << '\n';
  return kExitOk;
}

int CmdVerify(const mb::ExperimentConfig& cfg) {
  mb::MonitorGraph g = mb::LoadConfigGraph(cfg);
  fs::create_directories(cfg.output_dir);
  const mb::Rational T = cfg.mdp.T.value_or(mb::Rational(0));
  mb::Rational delta_ref = cfg.verify.delta_ref;
  if (delta_ref <= 0) delta_ref = cfg.mdp.delta / 4;

  mb::DiscretizationReport disc = mb::VerifyDiscretization(
      g, cfg.p0, cfg.mdp.delta, delta_ref, cfg.mdp.kappa_max, T, cfg.oracle);

  mb::OracleResult r0 = mb::ExactOptimum(g, cfg.mdp, cfg.p0, 0, cfg.oracle);
  bool t_pass = false;
  json t_inv{{"pass", false}};
  if (r0.found) {
    const mb::Rational big_t = mb::Diameter(g) + r0.j_star / g.w_min() + 1;
    mb::OracleResult rt = mb::ExactOptimum(g, cfg.mdp, cfg.p0, big_t, cfg.oracle);
    t_pass = rt.found && rt.j_star <= r0.j_star && r0.certified && rt.certified;
    t_inv = json{{"j_at_0", RationalJson(r0.j_star)},
                 {"T", mb::FormatDecimal(big_t)},
                 {"j_at_T", rt.found ? RationalJson(rt.j_star) : json()},
                 {"pass", t_pass}};
  }

  const bool pass = disc.holds && disc.certified && t_pass;
  json report{
      {"discretization",
       json{{"j_delta", RationalJson(disc.j_delta)},
            {"j_ref", RationalJson(disc.j_ref)},
            {"bound", RationalJson(disc.bound)},
            {"slack", mb::FormatDecimal(disc.slack)},
            {"holds", disc.holds},
            {"certified", disc.certified}}},
      {"t_invariance", t_inv},
      {"pass", pass}};
  WriteJsonFile(fs::path(cfg.output_dir) / "verify.json", report);
  std::cout << report.dump(2) << '\n';
  return pass ? kExitOk : kExitVerify;
}

int CmdMetrics(const mb::ExperimentConfig& cfg) {
  mb::MonitorGraph g = mb::LoadConfigGraph(cfg);
  const mb::Rational T = cfg.mdp.T.value_or(mb::Rational(0));
  std::vector<fs::path> inputs;
  if (fs::exists(cfg.output_dir)) {
    for (const auto& entry : fs::directory_iterator(cfg.output_dir)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("events_", 0) == 0 && entry.path().extension() == ".jsonl") {
        inputs.push_back(entry.path());
      }
    }
  }
  std::sort(inputs.begin(), inputs.end());
  for (const auto& path : inputs) {
    std::ifstream in(path);
    mb::EventLog log = mb::ReadEventLog(g, in);
    mb::MetricsReport report = mb::ComputeMetrics(g, log, T, log.end_time);
    fs::path base = path;
    base.replace_extension();
    std::string stem = base.filename().string();
    stem.replace(0, std::string("events").size(), "metrics");
    {
      std::ofstream out(fs::path(cfg.output_dir) / (stem + ".csv"));
      mb::WriteMetricsCsv(report, out);
    }
    {
      std::ofstream out(fs::path(cfg.output_dir) / (stem + ".json"));
      mb::WriteMetricsSummary(report, out);
    }
  }
  std::cout << "processed " << inputs.size() << " event logs\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"monitorbench: multi-robot persistent monitoring benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::string out_override;
  int jobs = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--seed", seed_override, "override the config seed");
    sub->add_option("--out", out_override, "override the output directory");
    sub->add_option("--jobs", jobs, "worker pool size")->default_val(1);
  };
  CLI::App* simulate = app.add_subcommand("simulate", "run seeded policy rollouts");
  CLI::App* oracle = app.add_subcommand("oracle", "exact optimum search");
  CLI::App* learn = app.add_subcommand("learn", "tabular SMDP Q-learning");
  CLI::App* verify = app.add_subcommand("verify", "theorem checks");
  CLI::App* metrics = app.add_subcommand("metrics", "recompute metrics from event logs");
  for (CLI::App* sub : {simulate, oracle, learn, verify, metrics}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    mb::ExperimentConfig cfg = mb::LoadExperimentConfig(config_path);
    if (seed_override) cfg.seed = *seed_override;
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (jobs < 1) throw mb::Error("config: --jobs must be >= 1");

    if (simulate->parsed()) return CmdSimulate(cfg, jobs);
    if (oracle->parsed()) return CmdOracle(cfg);
    if (learn->parsed()) return CmdLearn(cfg);
    if (verify->parsed()) return CmdVerify(cfg);
    if (metrics->parsed()) return CmdMetrics(cfg);
    return kExitConfig;
  } catch (const mb::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}
