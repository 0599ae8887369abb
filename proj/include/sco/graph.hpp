#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sco/dataset.hpp"

namespace sco {

inline constexpr double kDefaultWeightCap = 1e6;

struct Edge {
  Index i = 0;
  Index j = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected weighted graph over the model variables, one vertex per instance.
/// Edges are stored with i < j in lexicographic order.
struct VariableGraph {
  Index vertex_count = 0;
  std::vector<Edge> edges;

  Index edge_count() const noexcept { return static_cast<Index>(edges.size()); }

  friend bool operator==(const VariableGraph&, const VariableGraph&) = default;
};

struct GraphViolation {
  std::size_t edge_index = 0;
  std::string reason;
};

/// Every invariant violation found, in edge order. Empty means the graph is valid.
inline std::vector<GraphViolation> validate_graph(const VariableGraph& graph) {
  std::vector<GraphViolation> out;
  if (graph.vertex_count < 0) out.push_back({0, "negative vertex count"});
  std::set<std::pair<Index, Index>> seen;
  for (std::size_t k = 0; k < graph.edges.size(); ++k) {
    const Edge& e = graph.edges[k];
    if (e.i < 0 || e.j < 0 || e.i >= graph.vertex_count || e.j >= graph.vertex_count) {
      out.push_back({k, "endpoint out of range"});
    }
    if (e.i >= e.j) out.push_back({k, "edge must satisfy i < j"});
    if (!std::isfinite(e.weight) || e.weight <= 0.0) {
      out.push_back({k, "weight must be finite and strictly positive"});
    }
    if (!seen.emplace(e.i, e.j).second) out.push_back({k, "duplicate edge"});
  }
  return out;
}

/// k-nearest-neighbour graph in Euclidean distance. An edge (i, j) exists when either
/// endpoint is among the other's k nearest; distance ties go to the smaller index.
/// w_ij = min(1 / dist, weight_cap), so coincident points get weight_cap.
inline VariableGraph build_knn_graph(const Dataset& data, Index k,
                                     double weight_cap = kDefaultWeightCap) {
  const Index n = data.row_count();
  if (n < 2) throw ParameterError("knn graph needs at least two instances");
  if (k < 1 || k > n - 1) {
    throw ParameterError("k must lie in [1, n-1] (k=" + std::to_string(k) +
                         ", n=" + std::to_string(n) + ")");
  }
  if (!(weight_cap > 0.0) || !std::isfinite(weight_cap)) {
    throw ParameterError("weight_cap must be finite and positive");
  }
  const Matrix& a = data.values();

  Matrix dist(n, n);
  for (Index i = 0; i < n; ++i) {
    dist(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) {
      const double dij = (a.row(i) - a.row(j)).norm();
      dist(i, j) = dij;
      dist(j, i) = dij;
    }
  }

  std::set<std::pair<Index, Index>> pairs;
  std::vector<Index> order(static_cast<std::size_t>(n - 1));
  for (Index i = 0; i < n; ++i) {
    order.clear();
    for (Index j = 0; j < n; ++j) {
      if (j != i) order.push_back(j);
    }
    std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) {
      return dist(i, x) < dist(i, y) || (dist(i, x) == dist(i, y) && x < y);
    });
    for (Index r = 0; r < k; ++r) {
      const Index j = order[static_cast<std::size_t>(r)];
      pairs.emplace(std::min(i, j), std::max(i, j));
    }
  }

  VariableGraph graph;
  graph.vertex_count = n;
  graph.edges.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    const double dij = dist(i, j);
    const double w = dij == 0.0 ? weight_cap : std::min(1.0 / dij, weight_cap);
    graph.edges.push_back({i, j, w});
  }
  return graph;
}

}  // namespace sco
