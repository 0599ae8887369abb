#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sco/graph.hpp"

namespace sco {

inline constexpr std::uint64_t kDefaultPowerSeed = 0x5c0'2019ULL;

/// The m x n edge-incidence matrix Q scaled by alpha: row k carries +alpha*w_ij at
/// column i and -alpha*w_ij at column j. Stored as an edge list; the Kronecker maps
/// (I_d (x) Q) and its transpose are realized as Q X and Q^T lambda on n x d / m x d
/// matrices with column-stacking vectorization.
class EdgeIncidence {
 public:
  EdgeIncidence() = default;

  EdgeIncidence(const VariableGraph& graph, double alpha)
      : n_(graph.vertex_count), alpha_(alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
      throw ParameterError("alpha must be finite and non-negative");
    }
    if (const auto bad = validate_graph(graph); !bad.empty()) {
      throw ValidationError("invalid graph at edge " + std::to_string(bad.front().edge_index) +
                            ": " + bad.front().reason);
    }
    heads_.reserve(graph.edges.size());
    tails_.reserve(graph.edges.size());
    scales_.reserve(graph.edges.size());
    for (const Edge& e : graph.edges) {
      heads_.push_back(e.i);
      tails_.push_back(e.j);
      scales_.push_back(alpha * e.weight);
    }
  }

  Index row_count() const noexcept { return static_cast<Index>(scales_.size()); }
  Index col_count() const noexcept { return n_; }
  double alpha() const noexcept { return alpha_; }

  Index head(Index k) const { return heads_[static_cast<std::size_t>(k)]; }
  Index tail(Index k) const { return tails_[static_cast<std::size_t>(k)]; }
  /// alpha * w for edge k.
  double scale(Index k) const { return scales_[static_cast<std::size_t>(k)]; }

  /// True when Q is identically zero (no edges or alpha = 0).
  bool is_zero() const noexcept {
    for (double s : scales_) {
      if (s != 0.0) return false;
    }
    return true;
  }

  /// Q X for an n x d X; row k is alpha*w_ij*(X_i - X_j).
  Matrix apply_Q(const Eigen::Ref<const Matrix>& x) const {
    if (x.rows() != n_) throw DimensionError("apply_Q: X must have n rows");
    const Index m = row_count();
    Matrix out(m, x.cols());
    for (Index c = 0; c < x.cols(); ++c) {
      for (Index k = 0; k < m; ++k) {
        out(k, c) = scales_[k] * (x(heads_[k], c) - x(tails_[k], c));
      }
    }
    return out;
  }

  /// Q^T lambda for an m x d lambda. Accumulation order per output entry follows edge order.
  Matrix apply_QT(const Eigen::Ref<const Matrix>& lam) const {
    const Index m = row_count();
    if (lam.rows() != m) throw DimensionError("apply_QT: lambda must have m rows");
    Matrix out = Matrix::Zero(n_, lam.cols());
    for (Index c = 0; c < lam.cols(); ++c) {
      for (Index k = 0; k < m; ++k) {
        const double v = scales_[k] * lam(k, c);
        out(heads_[k], c) += v;
        out(tails_[k], c) -= v;
      }
    }
    return out;
  }

  /// Dense copy, for diagnostics and tests on small graphs.
  Matrix dense() const {
    Matrix q = Matrix::Zero(row_count(), n_);
    for (Index k = 0; k < row_count(); ++k) {
      q(k, heads_[k]) = scales_[k];
      q(k, tails_[k]) = -scales_[k];
    }
    return q;
  }

 private:
  Index n_ = 0;
  double alpha_ = 0.0;
  std::vector<Index> heads_;
  std::vector<Index> tails_;
  std::vector<double> scales_;
};

/// Sum over rows of the row-wise l_p norm (the l_{1,p} norm).
inline double sum_norms(const Eigen::Ref<const Matrix>& m, Norm p) {
  double total = 0.0;
  for (Index k = 0; k < m.rows(); ++k) total += norm_of(m.row(k), p);
  return total;
}

/// Largest singular value of Q by power iteration on Q^T Q, inflated by 1.01.
inline double operator_norm_estimate(const EdgeIncidence& q, int iterations = 50,
                                     std::uint64_t seed = kDefaultPowerSeed) {
  const Index n = q.col_count();
  if (q.row_count() == 0 || n == 0) return 0.0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = gauss(rng);
  v.normalize();
  double sigma2 = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vector w = q.apply_QT(q.apply_Q(v));
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    sigma2 = v.dot(w);
    v = w / nw;
  }
  sigma2 = std::max(sigma2, q.apply_Q(v).squaredNorm());
  return 1.01 * std::sqrt(sigma2);
}

}  // namespace sco
