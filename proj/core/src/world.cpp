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

#include "monitorbench/world.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>

#include "json.hpp"

namespace mb {

using nlohmann::json;

namespace {

void ValidatePose(const MonitorGraph& g, const RobotPose& p) {
  if (p.to < 0 || p.to >= g.num_nodes() || p.from < 0 ||
      p.from >= g.num_nodes()) {
    throw Error("pose node out of range");
  }
  if (p.remaining < 0) throw Error("negative remaining duration");
  if (p.stationary()) return;
  auto e = g.edge_between(p.from, p.to);
  if (!e) throw Error("pose on missing edge");
  if (p.remaining == 0 || p.remaining > g.edge(*e).length) {
    throw Error("pose remaining outside edge");
  }
}

}  // namespace

bool EventLog::operator==(const EventLog& o) const {
  if (num_nodes != o.num_nodes || end_time != o.end_time ||
      initial_poses.size() != o.initial_poses.size() ||
      records.size() != o.records.size() ||
      final_latencies != o.final_latencies) {
    return false;
  }
  for (size_t i = 0; i < initial_poses.size(); ++i) {
    if (!(initial_poses[i] == o.initial_poses[i])) return false;
  }
  for (size_t i = 0; i < final_poses.size(); ++i) {
    if (!(final_poses[i] == o.final_poses[i])) return false;
  }
  for (size_t i = 0; i < records.size(); ++i) {
    const EventRecord& a = records[i];
    const EventRecord& b = o.records[i];
    if (a.t != b.t || a.dt != b.dt || a.latencies != b.latencies) return false;
    if (a.poses.size() != b.poses.size() || a.action.size() != b.action.size())
      return false;
    for (size_t r = 0; r < a.poses.size(); ++r) {
      if (!(a.poses[r] == b.poses[r])) return false;
    }
    for (size_t r = 0; r < a.action.size(); ++r) {
      if (a.action[r].has_value() != b.action[r].has_value()) return false;
      if (a.action[r] && !(*a.action[r] == *b.action[r])) return false;
    }
  }
  return true;
}

WorldState WorldReset(const MonitorGraph& g, const std::vector<int>& p0_nodes) {
  std::vector<RobotPose> poses;
  poses.reserve(p0_nodes.size());
  for (int v : p0_nodes) poses.push_back(RobotPose::At(v));
  return WorldReset(g, poses);
}

WorldState WorldReset(const MonitorGraph& g, const std::vector<RobotPose>& p0) {
  for (const RobotPose& p : p0) ValidatePose(g, p);
  WorldState s;
  s.poses = p0;
  s.latencies.assign(g.num_nodes(), Rational(0));
  s.clock = 0;
  return s;
}

StepResult WorldStepInPlace(const MonitorGraph& g, WorldState& state,
                            const std::vector<std::optional<Command>>& commands,
                            const std::optional<Rational>& dt_cap,
                            bool allow_idle) {
  if (commands.size() != state.poses.size()) {
    throw Error("command count mismatch");
  }
  for (size_t r = 0; r < state.poses.size(); ++r) {
    RobotPose& pose = state.poses[r];
    if (!pose.ready()) {
      if (commands[r]) throw Error("command for a busy robot");
      continue;
    }
    if (!commands[r]) {
      if (!allow_idle) throw Error("missing command for a ready robot");
      continue;
    }
    const Command& cmd = *commands[r];
    if (cmd.kind == Command::kMove) {
      auto e = g.edge_between(pose.to, cmd.target);
      if (!e) throw Error("move target not adjacent");
      pose = RobotPose{pose.to, cmd.target, g.edge(*e).length};
    } else {
      if (cmd.wait <= 0) throw Error("nonpositive wait duration");
      pose = RobotPose{pose.to, pose.to, cmd.wait};
    }
  }

  std::optional<Rational> dt;
  for (const RobotPose& pose : state.poses) {
    if (pose.remaining > 0 && (!dt || pose.remaining < *dt)) dt = pose.remaining;
  }
  if (dt_cap) {
    if (*dt_cap <= 0) throw Error("nonpositive step cap");
    if (!dt || *dt_cap < *dt) dt = *dt_cap;
  }
  if (!dt) throw Error("no pending events and no step cap");

  StepResult result;
  result.dt = *dt;
  result.poses_during = state.poses;

  std::set<int> visited;
  for (RobotPose& pose : state.poses) {
    if (pose.stationary()) visited.insert(pose.to);  // occupied throughout
    if (pose.remaining > 0) {
      if (pose.remaining == *dt) {
        if (!pose.stationary()) visited.insert(pose.to);  // arrival
        pose = RobotPose::At(pose.to);
      } else {
        pose.remaining -= *dt;
      }
    }
  }
  for (int v = 0; v < g.num_nodes(); ++v) {
    if (visited.count(v)) {
      state.latencies[v] = 0;
    } else {
      state.latencies[v] += *dt;
    }
  }
  state.clock += *dt;
  result.visits.assign(visited.begin(), visited.end());
  return result;
}

std::pair<WorldState, std::vector<int>> WorldStep(
    const MonitorGraph& g, const WorldState& state,
    const std::vector<std::optional<Command>>& commands) {
  WorldState next = state;
  StepResult res = WorldStepInPlace(g, next, commands);
  return {std::move(next), std::move(res.visits)};
}

namespace {

struct PlanCursor {
  size_t prefix_idx = 0;
  size_t cycle_idx = 0;
};

std::optional<Command> NextCommand(const RobotPlan& plan, PlanCursor& cur) {
  const Segment* seg = nullptr;
  if (cur.prefix_idx < plan.prefix.size()) {
    seg = &plan.prefix[cur.prefix_idx++];
  } else if (!plan.cycle.empty()) {
    seg = &plan.cycle[cur.cycle_idx % plan.cycle.size()];
    ++cur.cycle_idx;
  } else {
    return std::nullopt;
  }
  if (seg->kind == Segment::kTraverse) return Command::Move(seg->node);
  return Command::Wait(seg->wait);
}

}  // namespace

EventLog RunPlan(const MonitorGraph& g, const std::vector<RobotPose>& p0,
                 const SegmentPlan& plan, const Rational& horizon) {
  if (plan.robots.size() != p0.size()) throw Error("plan/robot count mismatch");
  if (horizon < 0) throw Error("negative horizon");
  WorldState state = WorldReset(g, p0);
  std::vector<PlanCursor> cursors(p0.size());

  EventLog log;
  log.num_nodes = g.num_nodes();
  log.initial_poses = p0;
  while (state.clock < horizon) {
    std::vector<std::optional<Command>> commands(p0.size());
    for (size_t r = 0; r < p0.size(); ++r) {
      if (state.poses[r].ready()) {
        commands[r] = NextCommand(plan.robots[r], cursors[r]);
      }
    }
    EventRecord rec;
    rec.t = state.clock;
    rec.latencies = state.latencies;
    rec.action = commands;
    Rational cap = horizon - state.clock;
    StepResult res = WorldStepInPlace(g, state, commands, cap, /*allow_idle=*/true);
    rec.poses = std::move(res.poses_during);
    rec.dt = res.dt;
    log.records.push_back(std::move(rec));
  }
  log.end_time = state.clock;
  log.final_latencies = state.latencies;
  log.final_poses = state.poses;
  return log;
}

EventLog ReplayLog(const MonitorGraph& g, const EventLog& log) {
  WorldState state = WorldReset(g, log.initial_poses);
  EventLog out;
  out.num_nodes = g.num_nodes();
  out.initial_poses = log.initial_poses;
  for (const EventRecord& rec : log.records) {
    EventRecord nrec;
    nrec.t = state.clock;
    nrec.latencies = state.latencies;
    nrec.action = rec.action;
    StepResult res =
        WorldStepInPlace(g, state, rec.action, rec.dt, /*allow_idle=*/true);
    nrec.poses = std::move(res.poses_during);
    nrec.dt = res.dt;
    out.records.push_back(std::move(nrec));
  }
  out.end_time = state.clock;
  out.final_latencies = state.latencies;
  out.final_poses = state.poses;
  return out;
}

Rational LatencyAt(const MonitorGraph& g, const EventLog& log, int node,
                   const Rational& t) {
  if (node < 0 || node >= g.num_nodes()) throw Error("node out of range");
  if (t < 0 || t > log.end_time) throw Error("time outside logged horizon");
  for (const EventRecord& rec : log.records) {
    if (t == rec.t) return rec.latencies[node];
    if (t < rec.t + rec.dt) {
      for (const RobotPose& pose : rec.poses) {
        if (pose.stationary() && pose.to == node) return 0;
      }
      return rec.latencies[node] + (t - rec.t);
    }
  }
  return log.final_latencies.empty() ? Rational(0) : log.final_latencies[node];
}

Rational WorstWeightedLatency(const MonitorGraph& g, const EventLog& log,
                              const Rational& t) {
  Rational m = 0;
  for (int v = 0; v < g.num_nodes(); ++v) {
    Rational c = g.weight(v) * LatencyAt(g, log, v, t);
    if (c > m) m = c;
  }
  return m;
}

Rational TailSup(const MonitorGraph& g, const EventLog& log, const Rational& T,
                 const Rational& horizon) {
  if (T < 0 || T > horizon || horizon > log.end_time) {
    throw Error("tail_sup bounds outside logged horizon");
  }
  Rational m = WorstWeightedLatency(g, log, T);
  for (const EventRecord& rec : log.records) {
    Rational t_end = std::min(rec.t + rec.dt, horizon);
    if (t_end <= T || rec.t >= horizon) continue;
    std::vector<char> occupied(g.num_nodes(), 0);
    for (const RobotPose& pose : rec.poses) {
      if (pose.stationary()) occupied[pose.to] = 1;
    }
    for (int v = 0; v < g.num_nodes(); ++v) {
      if (occupied[v]) continue;
      Rational c = g.weight(v) * (rec.latencies[v] + (t_end - rec.t));
      if (c > m) m = c;
    }
  }
  return m;
}

bool VisitedInWindow(const MonitorGraph& g, const EventLog& log, int node,
                     const Rational& alpha, const Rational& beta) {
  for (const EventRecord& rec : log.records) {
    Rational t_end = rec.t + rec.dt;
    for (const RobotPose& pose : rec.poses) {
      if (!pose.stationary() && pose.from == node && rec.t >= alpha &&
          rec.t <= beta) {
        // Departure instant: the robot is at `from` only when the full edge
        // is still ahead of it.
        const Edge& e = g.edge(*g.edge_between(pose.from, pose.to));
        if (pose.remaining == e.length) return true;
      }
      if (pose.stationary() && pose.to == node &&
          std::max(rec.t, alpha) <= std::min(t_end, beta)) {
        return true;
      }
      if (!pose.stationary() && pose.to == node && pose.remaining == rec.dt &&
          t_end >= alpha && t_end <= beta) {
        return true;
      }
    }
  }
  return false;
}

namespace {

json PoseToJson(const MonitorGraph& g, const RobotPose& p) {
  return json::array(
      {g.node_id(p.from), g.node_id(p.to), FormatRatio(p.remaining)});
}

RobotPose PoseFromJson(const MonitorGraph& g, const json& j) {
  RobotPose p;
  p.from = g.node_index(j.at(0).get<std::string>());
  p.to = g.node_index(j.at(1).get<std::string>());
  p.remaining = ParseRational(j.at(2).get<std::string>());
  return p;
}

}  // namespace

void WriteEventLog(const MonitorGraph& g, const EventLog& log,
                   std::ostream& out) {
  json header;
  header["p0"] = json::array();
  for (const RobotPose& p : log.initial_poses) {
    header["p0"].push_back(PoseToJson(g, p));
  }
  header["end_time"] = FormatRatio(log.end_time);
  out << header.dump() << "\n";
  for (const EventRecord& rec : log.records) {
    json j;
    j["t"] = FormatRatio(rec.t);
    j["poses"] = json::array();
    for (const RobotPose& p : rec.poses) j["poses"].push_back(PoseToJson(g, p));
    j["latencies"] = json::array();
    for (const Rational& l : rec.latencies) {
      j["latencies"].push_back(FormatRatio(l));
    }
    j["action"] = json::array();
    for (const auto& cmd : rec.action) {
      if (!cmd) {
        j["action"].push_back(nullptr);
      } else if (cmd->kind == Command::kMove) {
        j["action"].push_back(json{{"move", g.node_id(cmd->target)}});
      } else {
        j["action"].push_back(json{{"wait", FormatRatio(cmd->wait)}});
      }
    }
    j["dt"] = FormatRatio(rec.dt);
    out << j.dump() << "\n";
  }
}

EventLog ReadEventLog(const MonitorGraph& g, std::istream& in) {
  EventLog log;
  log.num_nodes = g.num_nodes();
  std::string line;
  if (!std::getline(in, line)) throw Error("empty event log stream");
  json header = json::parse(line);
  for (const auto& p : header.at("p0")) {
    log.initial_poses.push_back(PoseFromJson(g, p));
  }
  Rational end_time = ParseRational(header.at("end_time").get<std::string>());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    EventRecord rec;
    rec.t = ParseRational(j.at("t").get<std::string>());
    for (const auto& p : j.at("poses")) rec.poses.push_back(PoseFromJson(g, p));
    for (const auto& l : j.at("latencies")) {
      rec.latencies.push_back(ParseRational(l.get<std::string>()));
    }
    for (const auto& a : j.at("action")) {
      if (a.is_null()) {
        rec.action.push_back(std::nullopt);
      } else if (a.contains("move")) {
        rec.action.push_back(
            Command::Move(g.node_index(a.at("move").get<std::string>())));
      } else {
        rec.action.push_back(
            Command::Wait(ParseRational(a.at("wait").get<std::string>())));
      }
    }
    rec.dt = ParseRational(j.at("dt").get<std::string>());
    log.records.push_back(std::move(rec));
  }
  // Rebuild the derived end state by replay for exact latencies.
  EventLog replayed = ReplayLog(g, log);
  replayed.end_time = replayed.records.empty() ? end_time : replayed.end_time;
  return replayed;
}

}  // namespace mb
