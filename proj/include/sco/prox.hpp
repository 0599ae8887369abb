#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "sco/common.hpp"

namespace sco {

/// Euclidean projection onto {x : ||x||_1 <= radius}. Sort-based, O(d log d).
inline Vector project_l1_ball(const Eigen::Ref<const Vector>& v, double radius = 1.0) {
  if (v.template lpNorm<1>() <= radius) return v;
  std::vector<double> mag(static_cast<std::size_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) mag[static_cast<std::size_t>(i)] = std::abs(v(i));
  std::stable_sort(mag.begin(), mag.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t r = 0; r < mag.size(); ++r) {
    cumulative += mag[r];
    const double candidate = (cumulative - radius) / static_cast<double>(r + 1);
    if (mag[r] - candidate > 0.0) theta = candidate;
  }
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double shrunk = std::max(std::abs(v(i)) - theta, 0.0);
    out(i) = std::copysign(shrunk, v(i));
  }
  return out;
}

/// Euclidean projection onto the unit l_q ball.
inline Vector project_ball(const Eigen::Ref<const Vector>& v, Norm q) {
  switch (q) {
    case Norm::Inf: return v.cwiseMax(-1.0).cwiseMin(1.0);
    case Norm::L2: {
      const double nv = v.norm();
      if (nv <= 1.0) return v;
      return v / nv;
    }
    case Norm::L1: return project_l1_ball(v, 1.0);
  }
  throw ParameterError("project_ball: invalid norm selector");
}

/// Projects every row of an m x d matrix onto the unit l_q ball.
inline void project_rows(Matrix& lam, Norm q) {
  if (q == Norm::Inf) {
    lam = lam.cwiseMax(-1.0).cwiseMin(1.0);
    return;
  }
  for (Index k = 0; k < lam.rows(); ++k) {
    Vector row = lam.row(k).transpose();
    lam.row(k) = project_ball(row, q).transpose();
  }
}

/// argmin_v t ||v||_s + ||v - omega||_2^2 / 2.
///   s = 1:   elementwise soft threshold at t
///   s = 2:   radial shrink by max(0, 1 - t / ||omega||_2)
///   s = inf: omega - t * P_{l1 ball}(omega / t)   (Moreau decomposition)
inline Vector prox_norm(const Eigen::Ref<const Vector>& omega, double t, Norm s) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ParameterError("prox_norm: t must be positive");
  switch (s) {
    case Norm::L1: {
      Vector out(omega.size());
      for (Index i = 0; i < omega.size(); ++i) {
        const double a = std::abs(omega(i));
        out(i) = a > t ? (1.0 - t / a) * omega(i) : 0.0;
      }
      return out;
    }
    case Norm::L2: {
      const double nw = omega.norm();
      if (nw <= t) return Vector::Zero(omega.size());
      return (1.0 - t / nw) * omega;
    }
    case Norm::Inf: {
      if (omega.template lpNorm<1>() <= t) return Vector::Zero(omega.size());
      return omega - t * project_l1_ball(omega / t, 1.0);
    }
  }
  throw ParameterError("prox_norm: invalid norm selector");
}

}  // namespace sco
