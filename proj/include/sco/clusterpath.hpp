#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sco/admm.hpp"
#include "sco/dataset.hpp"
#include "sco/graph.hpp"

namespace sco {

/// 1e-3 times the largest column range of the data, or 1e-3 for constant data.
inline double default_fuse_tolerance(const Matrix& values) {
  double widest = 0.0;
  for (Index j = 0; j < values.cols(); ++j) {
    widest = std::max(widest, values.col(j).maxCoeff() - values.col(j).minCoeff());
  }
  return widest > 0.0 ? 1e-3 * widest : 1e-3;
}

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(Index n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), Index{0});
  }

  Index find(Index v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  /// The smaller root wins, so every root is the smallest index of its set.
  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<Index> parent_;
};

}  // namespace detail

/// Connected components over edges whose endpoint rows are within eps_fuse. Each vertex is
/// labelled with the smallest vertex index in its component.
inline std::vector<Index> extract_clusters(const Matrix& x, const VariableGraph& graph,
                                           double eps_fuse) {
  if (!(eps_fuse > 0.0)) throw ParameterError("eps_fuse must be > 0");
  if (x.rows() != graph.vertex_count) {
    throw DimensionError("extract_clusters: X must have one row per vertex");
  }
  detail::DisjointSets sets(graph.vertex_count);
  for (const Edge& e : graph.edges) {
    if ((x.row(e.i) - x.row(e.j)).norm() <= eps_fuse) sets.unite(e.i, e.j);
  }
  std::vector<Index> labels(static_cast<std::size_t>(graph.vertex_count));
  for (Index v = 0; v < graph.vertex_count; ++v) labels[v] = sets.find(v);
  return labels;
}

inline Index cluster_count(const std::vector<Index>& labels) {
  return static_cast<Index>(std::set<Index>(labels.begin(), labels.end()).size());
}

/// Maps labels onto 0..k-1 in order of first appearance.
inline std::vector<Index> compact_labels(const std::vector<Index>& labels) {
  std::vector<Index> out(labels.size());
  std::vector<std::pair<Index, Index>> seen;
  for (std::size_t v = 0; v < labels.size(); ++v) {
    auto it = std::find_if(seen.begin(), seen.end(),
                           [&](const auto& kv) { return kv.first == labels[v]; });
    if (it == seen.end()) {
      seen.emplace_back(labels[v], static_cast<Index>(seen.size()));
      out[v] = seen.back().second;
    } else {
      out[v] = it->second;
    }
  }
  return out;
}

struct PathPoint {
  double alpha = 0.0;
  Matrix x;
  std::vector<Index> labels;
  int iterations = 0;
  SolveStatus status = SolveStatus::Converged;
};

struct ClusterPath {
  std::vector<PathPoint> points;
  double fuse_tolerance = 0.0;
  /// Set when the solver threw at some alpha; points holds everything before it.
  std::optional<double> failed_alpha;
  std::string failure;

  bool complete() const noexcept { return !failed_alpha.has_value(); }
};

struct SweepOptions {
  std::optional<double> fuse_tolerance;
  bool warm_start = true;
};

inline ClusterPath sweep(const TaskSpec& task, const Dataset& data, const VariableGraph& graph,
                         const std::vector<double>& alphas, SolverConfig config,
                         const SweepOptions& options = {}) {
  if (alphas.empty()) throw ParameterError("alphas must be nonempty");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] >= 0.0) || !std::isfinite(alphas[i])) {
      throw ParameterError("alphas must be finite and >= 0");
    }
    if (i > 0 && !(alphas[i] > alphas[i - 1])) {
      throw ParameterError("alphas must be strictly increasing");
    }
  }
  if (graph.vertex_count != data.row_count()) {
    throw DimensionError("graph vertex count must equal the number of rows");
  }
  ClusterPath path;
  path.fuse_tolerance = options.fuse_tolerance.value_or(default_fuse_tolerance(data.values()));
  if (!(path.fuse_tolerance > 0.0)) throw ParameterError("eps_fuse must be > 0");

  const AnyProblem problem = make_problem(task, data);
  std::optional<DualState> warm;
  for (const double alpha : alphas) {
    config.alpha = alpha;
    try {
      config.validate();
      const EdgeIncidence q(graph, alpha);
      SolveResult r = solve_dual(problem, q, config, options.warm_start ? warm : std::nullopt);
      PathPoint point;
      point.alpha = alpha;
      point.labels = extract_clusters(r.primal, graph, path.fuse_tolerance);
      point.x = std::move(r.primal);
      point.iterations = r.iterations;
      point.status = r.status;
      // A zero operator says nothing about the dual, so the chain restarts after it.
      if (q.is_zero()) {
        warm.reset();
      } else {
        warm = std::move(r.state);
      }
      path.points.push_back(std::move(point));
    } catch (const ParameterError&) {
      throw;
    } catch (const std::exception& e) {
      path.failed_alpha = alpha;
      path.failure = e.what();
      break;
    }
  }
  return path;
}

inline ClusterPath sweep(const Dataset& data, const VariableGraph& graph,
                         const std::vector<double>& alphas, const SolverConfig& config,
                         const SweepOptions& options = {}) {
  return sweep(TaskSpec{Task::ConvexClustering}, data, graph, alphas, config, options);
}

}  // namespace sco
