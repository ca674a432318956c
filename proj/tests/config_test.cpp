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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "monitorbench/config.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using mb::Rational;

namespace {

std::string ConfigPath(const std::string& name) {
  return std::string(MB_SOURCE_DIR) + "/configs/" + name;
}

fs::path WriteTemp(const std::string& name, const std::string& body) {
  fs::path dir = fs::temp_directory_path() / "mb_config_test";
  fs::create_directories(dir);
  fs::path p = dir / name;
  std::ofstream(p) << body;
  return p;
}

const std::string kGraphRef =
    "\"" + std::string(MB_SOURCE_DIR) + "/instances/triangle.json\"";

}  // namespace

TEST_CASE("bundled configs parse") {
  mb::ExperimentConfig cfg =
      mb::LoadExperimentConfig(ConfigPath("sigma2_scripted.json"));
  CHECK(cfg.schema == 1);
  CHECK(cfg.k == 3);
  CHECK(cfg.policy.name == "scripted");
  CHECK(cfg.policy.plan.robots.size() == 3);
  CHECK(cfg.horizon == Rational(30));
  mb::MonitorGraph g = mb::LoadConfigGraph(cfg);
  CHECK(g.num_nodes() == 4);

  mb::ExperimentConfig tsp =
      mb::LoadExperimentConfig(ConfigPath("tsp_long_edge.json"));
  mb::MonitorGraph g2 = mb::LoadConfigGraph(tsp);
  auto policy = mb::MakePolicy(g2, tsp);
  CHECK(policy != nullptr);
}

TEST_CASE("unknown keys are rejected") {
  fs::path p = WriteTemp("unknown.json", R"({
    "schema": 1, "graph": )" + kGraphRef + R"(,
    "robots": {"k": 1, "p0": ["1"]},
    "mdp": {"delta": "1"}, "horizon": "5", "frobnicate": true
  })");
  CHECK_THROWS_AS(mb::LoadExperimentConfig(p.string()), mb::Error);
}

TEST_CASE("unsupported schema version is rejected") {
  fs::path p = WriteTemp("schema.json", R"({
    "schema": 2, "graph": )" + kGraphRef + R"(,
    "robots": {"k": 1, "p0": ["1"]}, "horizon": "5"
  })");
  CHECK_THROWS_AS(mb::LoadExperimentConfig(p.string()), mb::Error);
}

TEST_CASE("robot count must match the pose list") {
  fs::path p = WriteTemp("kmismatch.json", R"({
    "schema": 1, "graph": )" + kGraphRef + R"(,
    "robots": {"k": 2, "p0": ["1"]}, "horizon": "5"
  })");
  CHECK_THROWS_AS(mb::LoadExperimentConfig(p.string()), mb::Error);
}

TEST_CASE("edge poses are validated against the graph") {
  fs::path good = WriteTemp("edge_pose.json", R"({
    "schema": 1, "graph": )" + kGraphRef + R"(,
    "robots": {"k": 1,
               "p0": [{"from": "1", "to": "2", "remaining": "1/2"}]},
    "horizon": "5"
  })");
  mb::ExperimentConfig cfg = mb::LoadExperimentConfig(good.string());
  CHECK(cfg.p0[0].remaining == Rational(1, 2));

  fs::path bad = WriteTemp("edge_pose_bad.json", R"({
    "schema": 1, "graph": )" + kGraphRef + R"(,
    "robots": {"k": 1,
               "p0": [{"from": "1", "to": "2", "remaining": "7"}]},
    "horizon": "5"
  })");
  CHECK_THROWS_AS(mb::LoadExperimentConfig(bad.string()), mb::Error);
}

TEST_CASE("unknown policy names are rejected") {
  fs::path p = WriteTemp("policy.json", R"({
    "schema": 1, "graph": )" + kGraphRef + R"(,
    "robots": {"k": 1, "p0": ["1"]},
    "policy": {"name": "simulated_annealing"}, "horizon": "5"
  })");
  CHECK_THROWS_AS(mb::LoadExperimentConfig(p.string()), mb::Error);
}

TEST_CASE("missing graph file is a configuration error") {
  fs::path p = WriteTemp("missing_graph.json", R"({
    "schema": 1, "graph": "no_such_instance.json",
    "robots": {"k": 1, "p0": ["1"]}, "horizon": "5"
  })");
  CHECK_THROWS_AS(mb::LoadExperimentConfig(p.string()), mb::Error);
}

#ifdef MB_CLI_PATH
namespace {

int RunCli(const std::string& args) {
  std::string cmd = std::string(MB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("cli exit codes") {
  fs::path out = fs::temp_directory_path() / "mb_cli_test";
  fs::create_directories(out);
  CHECK(RunCli("simulate --config " + ConfigPath("sigma2_scripted.json") +
               " --out " + (out / "sim").string()) == 0);
  CHECK(RunCli("oracle --config " + ConfigPath("oracle_triangle.json") +
               " --out " + (out / "oracle").string()) == 0);
  CHECK(RunCli("simulate --config /nonexistent.json") == 2);
  CHECK(RunCli("simulate") == 2);

  fs::path bad = WriteTemp("cli_bad.json", R"({"schema": 1, "bogus": 1})");
  CHECK(RunCli("simulate --config " + bad.string()) == 2);
}
#endif
