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

#ifndef MONITORBENCH_GRAPH_HPP_
#define MONITORBENCH_GRAPH_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "monitorbench/rational.hpp"

namespace mb {

struct Edge {
  int u;
  int v;
  Rational length;
};

// A point of the geometric realization |G|: a node, or a point strictly
// inside an edge at `offset` from edge endpoint `u`.
struct GraphPoint {
  int u = 0;
  int v = 0;
  Rational offset = 0;

  static GraphPoint Node(int n) { return GraphPoint{n, n, 0}; }
  static GraphPoint EdgeInterior(int u, int v, Rational offset) {
    return GraphPoint{u, v, std::move(offset)};
  }
  bool is_node() const { return u == v; }
  bool operator==(const GraphPoint& o) const {
    return u == o.u && v == o.v && offset == o.offset;
  }
};

// Connected undirected graph with positive node weights and edge lengths.
// Immutable after construction; all-pairs node distances and canonical
// shortest paths are precomputed.
class MonitorGraph {
 public:
  MonitorGraph(std::vector<std::string> node_ids, std::vector<Rational> weights,
               std::vector<Edge> edges);

  int num_nodes() const { return static_cast<int>(ids_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::string& node_id(int i) const { return ids_[i]; }
  const Rational& weight(int i) const { return weights_[i]; }
  const Edge& edge(int e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Rational& w_max() const { return w_max_; }
  const Rational& w_min() const { return w_min_; }

  int node_index(const std::string& id) const;  // throws on unknown id
  std::optional<int> edge_between(int u, int v) const;
  bool adjacent(int u, int v) const { return edge_between(u, v).has_value(); }
  // Neighbors sorted by node index.
  const std::vector<int>& neighbors(int u) const { return adjacency_[u]; }

  // Shortest-path node metric.
  const Rational& node_distance(int u, int v) const { return dist_[u][v]; }
  // Canonical shortest node path (lexicographically smallest id sequence),
  // including both endpoints.
  std::vector<int> node_path(int u, int v) const;

 private:
  void Validate() const;
  void ComputeAllPairs();

  std::vector<std::string> ids_;
  std::vector<Rational> weights_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<std::vector<Rational>> dist_;
  // next_[u][v]: first hop of the canonical path u -> v.
  std::vector<std::vector<int>> next_;
  std::vector<int> id_rank_;  // rank of node index in id-lexicographic order
  Rational w_max_ = 0;
  Rational w_min_ = 0;
};

MonitorGraph LoadGraph(const std::string& path);
MonitorGraph GraphFromJsonText(const std::string& text);

struct PathResult {
  Rational distance;
  std::vector<GraphPoint> waypoints;
};

PathResult ShortestPath(const MonitorGraph& g, const GraphPoint& a,
                        const GraphPoint& b);

// Diameter of the geometric realization |G| (edge-interior points included),
// computed exactly via per-edge-pair closed-form maximization.
Rational Diameter(const MonitorGraph& g);

struct TspResult {
  std::vector<int> tour;  // node order; closing leg back to tour[0] implied
  Rational length;        // cyclic length in the shortest-path metric
};

// Nearest-neighbor construction plus 2-opt in the metric closure.
TspResult TspTour(const MonitorGraph& g);

// Expands a metric-closure tour into a closed walk on g (consecutive walk
// nodes adjacent); first node repeated at the end.
std::vector<int> TourWalk(const MonitorGraph& g, const std::vector<int>& tour);

struct GpeTable {
  // coords[node] has d_gpe entries; column j is the eigenvector of the
  // (j+1)-th smallest eigenvalue of the normalized Laplacian.
  std::vector<std::vector<double>> coords;
  std::vector<double> eigenvalues;
};

GpeTable LaplacianGpe(const MonitorGraph& g, int d_gpe);

}  // namespace mb

#endif  // MONITORBENCH_GRAPH_HPP_
