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

#include "monitorbench/graph.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "json.hpp"

namespace mb {
namespace {

using nlohmann::json;

Rational RationalFromJson(const json& j) {
  if (j.is_string()) return ParseRational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number_float()) return ParseRational(j.dump());
  throw Error("expected number or decimal string, got: " + j.dump());
}

}  // namespace

MonitorGraph::MonitorGraph(std::vector<std::string> node_ids,
                           std::vector<Rational> weights,
                           std::vector<Edge> edges)
    : ids_(std::move(node_ids)),
      weights_(std::move(weights)),
      edges_(std::move(edges)) {
  Validate();
  const int n = num_nodes();
  adjacency_.assign(n, {});
  for (const Edge& e : edges_) {
    adjacency_[e.u].push_back(e.v);
    adjacency_[e.v].push_back(e.u);
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());

  id_rank_.assign(n, 0);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return ids_[a] < ids_[b]; });
  for (int r = 0; r < n; ++r) id_rank_[order[r]] = r;

  w_max_ = w_min_ = weights_[0];
  for (const Rational& w : weights_) {
    if (w > w_max_) w_max_ = w;
    if (w < w_min_) w_min_ = w;
  }
  ComputeAllPairs();
}

void MonitorGraph::Validate() const {
  if (ids_.empty()) throw Error("graph has no nodes");
  if (ids_.size() != weights_.size()) throw Error("node/weight count mismatch");
  std::set<std::string> seen(ids_.begin(), ids_.end());
  if (seen.size() != ids_.size()) throw Error("duplicate node id");
  for (const Rational& w : weights_) {
    if (w <= 0) throw Error("nonpositive node weight");
  }
  std::set<std::pair<int, int>> pairs;
  for (const Edge& e : edges_) {
    if (e.u < 0 || e.u >= num_nodes() || e.v < 0 || e.v >= num_nodes()) {
      throw Error("edge endpoint out of range");
    }
    if (e.u == e.v) throw Error("self-loop edge");
    if (e.length <= 0) throw Error("nonpositive edge length");
    auto key = std::minmax(e.u, e.v);
    if (!pairs.insert(key).second) throw Error("duplicate edge");
  }
  // Connectivity.
  std::vector<char> visited(num_nodes(), 0);
  std::queue<int> q;
  q.push(0);
  visited[0] = 1;
  int count = 1;
  std::vector<std::vector<int>> adj(num_nodes());
  for (const Edge& e : edges_) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[u]) {
      if (!visited[v]) {
        visited[v] = 1;
        ++count;
        q.push(v);
      }
    }
  }
  if (count != num_nodes()) throw Error("graph is disconnected");
}

void MonitorGraph::ComputeAllPairs() {
  const int n = num_nodes();
  std::map<std::pair<int, int>, Rational> elen;
  for (const Edge& e : edges_) elen[std::minmax(e.u, e.v)] = e.length;

  dist_.assign(n, std::vector<Rational>(n));
  next_.assign(n, std::vector<int>(n, -1));
  const Rational kInf = -1;  // sentinel: negative means unreached

  for (int s = 0; s < n; ++s) {
    std::vector<Rational> d(n, kInf);
    std::vector<char> done(n, 0);
    d[s] = 0;
    for (int iter = 0; iter < n; ++iter) {
      int best = -1;
      for (int u = 0; u < n; ++u) {
        if (done[u] || d[u] < 0) continue;
        if (best == -1 || d[u] < d[best] ||
            (d[u] == d[best] && id_rank_[u] < id_rank_[best])) {
          best = u;
        }
      }
      if (best == -1) break;
      done[best] = 1;
      for (int v : adjacency_[best]) {
        Rational nd = d[best] + elen.at(std::minmax(best, v));
        if (d[v] < 0 || nd < d[v]) d[v] = nd;
      }
    }
    for (int v = 0; v < n; ++v) dist_[s][v] = d[v];
  }

  // Canonical first hop: among neighbors on a shortest path, take the one
  // with the lexicographically smallest id. Greedy per hop yields the
  // lexicographically smallest node-id sequence overall.
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (u == v) {
        next_[u][v] = v;
        continue;
      }
      int best = -1;
      for (int x : adjacency_[u]) {
        Rational via = elen.at(std::minmax(u, x)) + dist_[x][v];
        if (via == dist_[u][v]) {
          if (best == -1 || id_rank_[x] < id_rank_[best]) best = x;
        }
      }
      next_[u][v] = best;
    }
  }
}

int MonitorGraph::node_index(const std::string& id) const {
  for (int i = 0; i < num_nodes(); ++i) {
    if (ids_[i] == id) return i;
  }
  throw Error("unknown node id: " + id);
}

std::optional<int> MonitorGraph::edge_between(int u, int v) const {
  for (int e = 0; e < num_edges(); ++e) {
    if ((edges_[e].u == u && edges_[e].v == v) ||
        (edges_[e].u == v && edges_[e].v == u)) {
      return e;
    }
  }
  return std::nullopt;
}

std::vector<int> MonitorGraph::node_path(int u, int v) const {
  std::vector<int> path{u};
  int cur = u;
  while (cur != v) {
    cur = next_[cur][v];
    if (cur == -1) throw Error("no path");
    path.push_back(cur);
  }
  return path;
}

MonitorGraph GraphFromJsonText(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("graph parse error: ") + e.what());
  }
  if (!j.is_object() || !j.contains("nodes") || !j.contains("edges")) {
    throw Error("graph file must contain nodes and edges");
  }
  std::vector<std::string> ids;
  std::vector<Rational> weights;
  for (const auto& node : j.at("nodes")) {
    ids.push_back(node.at("id").get<std::string>());
    weights.push_back(RationalFromJson(node.at("weight")));
  }
  std::map<std::string, int> index;
  for (size_t i = 0; i < ids.size(); ++i) index[ids[i]] = static_cast<int>(i);
  std::vector<Edge> edges;
  for (const auto& edge : j.at("edges")) {
    auto u = index.find(edge.at("u").get<std::string>());
    auto v = index.find(edge.at("v").get<std::string>());
    if (u == index.end() || v == index.end()) {
      throw Error("edge references unknown node");
    }
    edges.push_back({u->second, v->second, RationalFromJson(edge.at("length"))});
  }
  return MonitorGraph(std::move(ids), std::move(weights), std::move(edges));
}

MonitorGraph LoadGraph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open graph file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return GraphFromJsonText(ss.str());
}

namespace {

void CheckPoint(const MonitorGraph& g, const GraphPoint& p) {
  if (p.is_node()) {
    if (p.u < 0 || p.u >= g.num_nodes()) throw Error("point node out of range");
    if (p.offset != 0) throw Error("node point with nonzero offset");
    return;
  }
  auto e = g.edge_between(p.u, p.v);
  if (!e) throw Error("point references missing edge");
  if (p.offset <= 0 || p.offset >= g.edge(*e).length) {
    throw Error("edge-interior offset out of range");
  }
}

// (endpoint node, distance from the point to that endpoint)
std::vector<std::pair<int, Rational>> Exits(const MonitorGraph& g,
                                            const GraphPoint& p) {
  if (p.is_node()) return {{p.u, Rational(0)}};
  auto e = g.edge_between(p.u, p.v);
  const Rational& len = g.edge(*e).length;
  return {{p.u, p.offset}, {p.v, len - p.offset}};
}

}  // namespace

PathResult ShortestPath(const MonitorGraph& g, const GraphPoint& a,
                        const GraphPoint& b) {
  CheckPoint(g, a);
  CheckPoint(g, b);
  if (a == b) return {0, {a}};

  bool same_edge = !a.is_node() && !b.is_node() &&
                   ((a.u == b.u && a.v == b.v) || (a.u == b.v && a.v == b.u));
  std::optional<Rational> direct;
  if (same_edge) {
    auto e = g.edge_between(a.u, a.v);
    Rational ob = (a.u == b.u) ? b.offset : g.edge(*e).length - b.offset;
    direct = RationalAbs(a.offset - ob);
  }

  std::optional<Rational> best;
  int best_ea = -1, best_eb = -1;
  for (const auto& [ea, da] : Exits(g, a)) {
    for (const auto& [eb, db] : Exits(g, b)) {
      Rational total = da + g.node_distance(ea, eb) + db;
      if (!best || total < *best) {
        best = total;
        best_ea = ea;
        best_eb = eb;
      }
    }
  }
  if (direct && *direct <= *best) {
    return {*direct, {a, b}};
  }
  std::vector<GraphPoint> waypoints;
  waypoints.push_back(a);
  for (int node : g.node_path(best_ea, best_eb)) {
    if (!waypoints.back().is_node() || waypoints.back().u != node) {
      waypoints.push_back(GraphPoint::Node(node));
    }
  }
  if (!(waypoints.back() == b)) waypoints.push_back(b);
  return {*best, waypoints};
}

namespace {

// f(s, t) = a*s + b*t + c.
struct Lin {
  Rational a, b, c;
  Rational At(const Rational& s, const Rational& t) const {
    return a * s + b * t + c;
  }
};

// Half-plane a*s + b*t <= c.
struct Half {
  Rational a, b, c;
};

bool Inside(const std::vector<Half>& hs, const Rational& s, const Rational& t) {
  for (const Half& h : hs) {
    if (h.a * s + h.b * t > h.c) return false;
  }
  return true;
}

std::optional<std::pair<Rational, Rational>> Intersect(
    const Rational& a1, const Rational& b1, const Rational& c1,
    const Rational& a2, const Rational& b2, const Rational& c2) {
  Rational det = a1 * b2 - a2 * b1;
  if (det == 0) return std::nullopt;
  Rational s = (c1 * b2 - c2 * b1) / det;
  Rational t = (a1 * c2 - a2 * c1) / det;
  return std::make_pair(s, t);
}

// Maximum over the polygon (given by half-planes and its vertices) of
// min_i f_i. The min of linear functions is concave, so the maximum is
// attained at a vertex of the induced subdivision.
Rational MaxMinLinear(const std::vector<Lin>& fs, const std::vector<Half>& hs,
                      const std::vector<std::pair<Rational, Rational>>& verts) {
  std::vector<std::pair<Rational, Rational>> cands = verts;
  std::vector<std::array<Rational, 3>> eq_lines;  // a*s + b*t = c
  for (size_t i = 0; i < fs.size(); ++i) {
    for (size_t j = i + 1; j < fs.size(); ++j) {
      eq_lines.push_back({fs[i].a - fs[j].a, fs[i].b - fs[j].b,
                          fs[j].c - fs[i].c});
    }
  }
  for (const auto& l : eq_lines) {
    for (const Half& h : hs) {
      auto p = Intersect(l[0], l[1], l[2], h.a, h.b, h.c);
      if (p && Inside(hs, p->first, p->second)) cands.push_back(*p);
    }
  }
  for (size_t i = 0; i < eq_lines.size(); ++i) {
    for (size_t j = i + 1; j < eq_lines.size(); ++j) {
      auto p = Intersect(eq_lines[i][0], eq_lines[i][1], eq_lines[i][2],
                         eq_lines[j][0], eq_lines[j][1], eq_lines[j][2]);
      if (p && Inside(hs, p->first, p->second)) cands.push_back(*p);
    }
  }
  std::optional<Rational> best;
  for (const auto& [s, t] : cands) {
    std::optional<Rational> m;
    for (const Lin& f : fs) {
      Rational v = f.At(s, t);
      if (!m || v < *m) m = v;
    }
    if (!best || *m > *best) best = *m;
  }
  return best.value_or(Rational(0));
}

}  // namespace

Rational Diameter(const MonitorGraph& g) {
  const int n = g.num_nodes();
  Rational best = 0;
  for (int u = 0; u < n; ++u) {
    for (int v = u; v < n; ++v) {
      if (g.node_distance(u, v) > best) best = g.node_distance(u, v);
    }
  }
  // Node vs edge interior.
  for (int w = 0; w < n; ++w) {
    for (const Edge& e : g.edges()) {
      Rational du = g.node_distance(w, e.u);
      Rational dv = g.node_distance(w, e.v);
      // g(t) = min(du + t, dv + l - t) on [0, l]; peak where both agree.
      std::vector<Rational> ts{Rational(0), e.length};
      Rational tstar = (dv + e.length - du) / 2;
      if (tstar > 0 && tstar < e.length) ts.push_back(tstar);
      for (const Rational& t : ts) {
        Rational val = std::min(du + t, dv + e.length - t);
        if (val > best) best = val;
      }
    }
  }
  // Edge interior vs edge interior.
  for (int i = 0; i < g.num_edges(); ++i) {
    const Edge& e1 = g.edge(i);
    {
      // Same edge: points at offsets s <= t from e1.u.
      Rational d = g.node_distance(e1.u, e1.v);
      Rational l = e1.length;
      std::vector<Lin> fs{{-1, 1, 0},
                          {1, -1, d + l},
                          {-1, 1, d + l},
                          {-1, -1, 2 * l}};
      std::vector<Half> hs{{-1, 0, 0}, {1, -1, 0}, {0, 1, l}};
      std::vector<std::pair<Rational, Rational>> verts{
          {0, 0}, {0, l}, {l, l}};
      Rational val = MaxMinLinear(fs, hs, verts);
      if (val > best) best = val;
    }
    for (int j = i + 1; j < g.num_edges(); ++j) {
      const Edge& e2 = g.edge(j);
      Rational l1 = e1.length, l2 = e2.length;
      std::vector<Lin> fs{
          {1, 1, g.node_distance(e1.u, e2.u)},
          {1, -1, g.node_distance(e1.u, e2.v) + l2},
          {-1, 1, g.node_distance(e1.v, e2.u) + l1},
          {-1, -1, g.node_distance(e1.v, e2.v) + l1 + l2}};
      std::vector<Half> hs{{-1, 0, 0}, {1, 0, l1}, {0, -1, 0}, {0, 1, l2}};
      std::vector<std::pair<Rational, Rational>> verts{
          {0, 0}, {0, l2}, {l1, 0}, {l1, l2}};
      Rational val = MaxMinLinear(fs, hs, verts);
      if (val > best) best = val;
    }
  }
  return best;
}

namespace {

Rational CyclicLength(const MonitorGraph& g, const std::vector<int>& tour) {
  Rational len = 0;
  for (size_t i = 0; i < tour.size(); ++i) {
    len += g.node_distance(tour[i], tour[(i + 1) % tour.size()]);
  }
  return len;
}

}  // namespace

TspResult TspTour(const MonitorGraph& g) {
  const int n = g.num_nodes();
  std::vector<int> rank_order(n);
  std::iota(rank_order.begin(), rank_order.end(), 0);
  std::sort(rank_order.begin(), rank_order.end(),
            [&](int a, int b) { return g.node_id(a) < g.node_id(b); });

  std::vector<int> tour{rank_order[0]};
  std::vector<char> used(n, 0);
  used[rank_order[0]] = 1;
  while (static_cast<int>(tour.size()) < n) {
    int cur = tour.back();
    int pick = -1;
    for (int cand : rank_order) {
      if (used[cand]) continue;
      if (pick == -1 || g.node_distance(cur, cand) < g.node_distance(cur, pick)) {
        pick = cand;
      }
    }
    used[pick] = 1;
    tour.push_back(pick);
  }

  // 2-opt, first-improvement scan until a fixed point.
  bool improved = true;
  while (improved && n >= 4) {
    improved = false;
    for (int i = 1; i < n - 1 && !improved; ++i) {
      for (int j = i + 1; j < n && !improved; ++j) {
        int a = tour[i - 1], b = tour[i], c = tour[j], d = tour[(j + 1) % n];
        Rational before = g.node_distance(a, b) + g.node_distance(c, d);
        Rational after = g.node_distance(a, c) + g.node_distance(b, d);
        if (after < before) {
          std::reverse(tour.begin() + i, tour.begin() + j + 1);
          improved = true;
        }
      }
    }
  }
  return {tour, CyclicLength(g, tour)};
}

std::vector<int> TourWalk(const MonitorGraph& g, const std::vector<int>& tour) {
  std::vector<int> walk{tour[0]};
  for (size_t i = 0; i < tour.size(); ++i) {
    int from = tour[i];
    int to = tour[(i + 1) % tour.size()];
    std::vector<int> leg = g.node_path(from, to);
    for (size_t j = 1; j < leg.size(); ++j) walk.push_back(leg[j]);
  }
  return walk;
}

GpeTable LaplacianGpe(const MonitorGraph& g, int d_gpe) {
  const int n = g.num_nodes();
  if (d_gpe < 1 || d_gpe > n - 1) throw Error("d_gpe out of range");
  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    adj(e.u, e.v) = 1.0;
    adj(e.v, e.u) = 1.0;
  }
  Eigen::VectorXd dhalf(n);
  for (int i = 0; i < n; ++i) {
    double deg = adj.row(i).sum();
    dhalf(i) = deg > 0 ? 1.0 / std::sqrt(deg) : 0.0;
  }
  Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(n, n) -
                        dhalf.asDiagonal() * adj * dhalf.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  GpeTable table;
  table.coords.assign(n, std::vector<double>(d_gpe, 0.0));
  for (int j = 0; j < d_gpe; ++j) {
    Eigen::VectorXd vec = solver.eigenvectors().col(j + 1);
    for (int i = 0; i < n; ++i) {
      if (std::abs(vec(i)) > 1e-9) {
        if (vec(i) < 0) vec = -vec;
        break;
      }
    }
    for (int i = 0; i < n; ++i) table.coords[i][j] = vec(i);
    table.eigenvalues.push_back(solver.eigenvalues()(j + 1));
  }
  return table;
}

}  // namespace mb
