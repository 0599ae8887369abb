#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include "sco/sco.hpp"

namespace sco::testing {

inline Matrix gaussian(std::mt19937_64& rng, Index rows, Index cols, double sd = 1.0) {
  std::normal_distribution<double> g(0.0, sd);
  Matrix m(rows, cols);
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = g(rng);
  return m;
}

inline Vector gaussian_vector(std::mt19937_64& rng, Index size, double sd = 1.0) {
  std::normal_distribution<double> g(0.0, sd);
  Vector v(size);
  for (Index k = 0; k < size; ++k) v(k) = g(rng);
  return v;
}

/// Two well separated groups of `half` rows around -spread and +spread.
inline Matrix two_clusters(std::mt19937_64& rng, Index half, Index d, double spread,
                           double noise) {
  Matrix a = gaussian(rng, 2 * half, d, noise);
  a.topRows(half).array() -= spread;
  a.bottomRows(half).array() += spread;
  return a;
}

inline VariableGraph chain_graph(Index n, double weight = 1.0) {
  VariableGraph g;
  g.vertex_count = n;
  for (Index i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1, weight});
  return g;
}

inline VariableGraph complete_graph(Index n, double weight = 1.0) {
  VariableGraph g;
  g.vertex_count = n;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) g.edges.push_back({i, j, weight});
  }
  return g;
}

/// A subgradient of ||r||_p.
inline Vector norm_subgradient(const Vector& r, Norm p) {
  Vector g = Vector::Zero(r.size());
  switch (p) {
    case Norm::L2: {
      const double nr = r.norm();
      if (nr > 0.0) g = r / nr;
      break;
    }
    case Norm::L1:
      for (Index i = 0; i < r.size(); ++i) g(i) = r(i) > 0.0 ? 1.0 : (r(i) < 0.0 ? -1.0 : 0.0);
      break;
    case Norm::Inf: {
      Index best = 0;
      const double top = r.cwiseAbs().maxCoeff(&best);
      if (top > 0.0) g(best) = r(best) > 0.0 ? 1.0 : -1.0;
      break;
    }
  }
  return g;
}

/// Primal subgradient method on ||X - A||^2 + sum_k ||(QX)_k||_p.
/// The objective is 2-strongly convex: step 1/(2t), iterate averaged over the last half.
inline Matrix subgradient_oracle(const Matrix& a, const EdgeIncidence& q, Norm p,
                                 long iterations) {
  Matrix x = a;
  Matrix avg = Matrix::Zero(a.rows(), a.cols());
  long counted = 0;
  for (long t = 1; t <= iterations; ++t) {
    const Matrix r = q.apply_Q(x);
    Matrix g_edges(r.rows(), r.cols());
    for (Index k = 0; k < r.rows(); ++k) {
      g_edges.row(k) = norm_subgradient(r.row(k).transpose(), p).transpose();
    }
    const Matrix g = 2.0 * (x - a) + q.apply_QT(g_edges);
    x -= g / (2.0 * static_cast<double>(t));
    if (2 * t > iterations) {
      avg += x;
      ++counted;
    }
  }
  return avg / static_cast<double>(counted);
}

/// Minimizer of a convex function on [lo, hi] by golden-section search.
inline double golden_min(const std::function<double(double)>& f, double lo, double hi,
                         int iterations = 300) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < iterations && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++i) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

/// argmin_v t ||v||_s + ||v - w||^2 / 2 by one-dimensional searches:
///   s = 1   per coordinate;
///   s = 2   over the radius along w;
///   s = inf over the box half-width r, the inner problem being a clip.
inline Vector numeric_prox(const Vector& w, double t, Norm s) {
  Vector out(w.size());
  switch (s) {
    case Norm::L1:
      for (Index i = 0; i < w.size(); ++i) {
        const double wi = w(i);
        const double bound = std::abs(wi) + 1.0;
        out(i) = golden_min(
            [&](double v) { return t * std::abs(v) + 0.5 * (v - wi) * (v - wi); }, -bound, bound);
      }
      return out;
    case Norm::L2: {
      const double nw = w.norm();
      if (nw == 0.0) return Vector::Zero(w.size());
      const double r = golden_min(
          [&](double rad) { return t * rad + 0.5 * (rad - nw) * (rad - nw); }, 0.0, nw);
      return (r / nw) * w;
    }
    case Norm::Inf: {
      auto clip = [&](double r) { return Vector(w.cwiseMax(-r).cwiseMin(r)); };
      const double top = w.cwiseAbs().maxCoeff();
      const double r = golden_min(
          [&](double rad) { return t * rad + 0.5 * (clip(rad) - w).squaredNorm(); }, 0.0, top);
      return clip(r);
    }
  }
  return out;
}

inline double relative_error(const Matrix& got, const Matrix& want) {
  return (got - want).norm() / std::max(want.norm(), 1e-12);
}

/// A fresh scratch directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("sco-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace sco::testing
