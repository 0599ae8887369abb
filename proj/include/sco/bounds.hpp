#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sco/incidence.hpp"
#include "sco/problems.hpp"

namespace sco {

/// Values the bound was computed from, enough to recompute lhs and rhs.
struct BoundInputs {
  double beta = 0.0;
  double c = 0.0;
  double norm_data = 0.0;
  double norm_delta = 0.0;
};

struct BoundReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
  BoundInputs inputs;
  /// Named intermediate terms of the right-hand side.
  std::vector<std::pair<std::string, double>> terms;
};

inline bool bound_holds(double lhs, double rhs) { return lhs <= rhs + 1e-9 * std::abs(rhs); }

namespace detail {

inline void require_positive_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ParameterError("beta must be positive");
}

inline BoundReport make_report(std::string name, double lhs, double rhs, BoundInputs in) {
  BoundReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.satisfied = bound_holds(lhs, rhs);
  r.inputs = in;
  return r;
}

}  // namespace detail

/// Spectral norm of a linear map on n x d matrices by power iteration on M^T M,
/// inflated by 1.01.
template <class Apply, class ApplyTranspose>
double spectral_norm_estimate(const Apply& apply, const ApplyTranspose& apply_transpose,
                              Index rows, Index cols, int iterations = 100,
                              std::uint64_t seed = kDefaultPowerSeed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix v(rows, cols);
  for (Index k = 0; k < v.size(); ++k) v.data()[k] = gauss(rng);
  v /= v.norm();
  double best = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const Matrix mv = apply(v);
    best = std::max(best, mv.squaredNorm());
    const Matrix w = apply_transpose(mv);
    const double nw = w.norm();
    if (nw == 0.0) break;
    v = w / nw;
  }
  best = std::max(best, apply(v).squaredNorm());
  return 1.01 * std::sqrt(best);
}

/// ||A + Delta||_F^2 / beta.
inline double clustering_dual_limit(const Matrix& a_new, double beta) {
  detail::require_positive_beta(beta);
  return a_new.squaredNorm() / beta;
}

/// ||vec(Q^T lambda~)||_s.
inline double dual_regularizer_value(const EdgeIncidence& q, const Matrix& lam_tilde, Norm s) {
  return norm_of(vec(q.apply_QT(lam_tilde)), s);
}

inline BoundReport clustering_dual_check(const EdgeIncidence& q, const Matrix& lam_tilde, Norm s,
                                const Matrix& a_new, double beta) {
  const double rhs = clustering_dual_limit(a_new, beta);
  auto r = detail::make_report("clustering_dual", dual_regularizer_value(q, lam_tilde, s), rhs,
                               {beta, 0.0, a_new.norm(), 0.0});
  r.terms = {{"norm_sq_data_new", a_new.squaredNorm()}};
  return r;
}

/// Convex clustering:
///   <A, X~ - X> <= <A, Delta> + c/2 + ||Delta||_2 ||A + Delta||_F^2 / (2 beta).
/// The left side is an inner product and may be negative.
inline BoundReport clustering_shift_check(const Matrix& a, const Matrix& delta, double beta, double c,
                                  const Matrix& x_star, const Matrix& x_tilde) {
  detail::require_positive_beta(beta);
  require_shape(delta, a.rows(), a.cols(), "clustering_shift_check: delta");
  require_shape(x_star, a.rows(), a.cols(), "clustering_shift_check: X*");
  require_shape(x_tilde, a.rows(), a.cols(), "clustering_shift_check: X~*");
  const double lhs = vec(a).dot(vec(x_tilde) - vec(x_star));
  const double inner = vec(a).dot(vec(delta));
  const Matrix a_new = a + delta;
  const double spread = delta.norm() * a_new.squaredNorm() / (2.0 * beta);
  auto r = detail::make_report("clustering_shift", lhs, inner + 0.5 * c + spread,
                               {beta, c, a.norm(), delta.norm()});
  r.terms = {{"data_delta_inner", inner}, {"half_c", 0.5 * c}, {"perturbation_term", spread}};
  return r;
}

namespace detail {

/// ||Omega'^-1 Phi Omega'^-1||_2 for a diagonal Omega' (stored n x d).
inline double scaled_phi_norm(const Matrix& a, const Matrix& delta, const Matrix& omega_diag,
                              std::uint64_t seed) {
  auto apply = [&](const Matrix& v) {
    const Matrix inner = (v.array() / omega_diag.array()).matrix();
    return Matrix((ridge::phi_apply(a, delta, inner).array() / omega_diag.array()).matrix());
  };
  auto apply_t = [&](const Matrix& v) {
    const Matrix inner = (v.array() / omega_diag.array()).matrix();
    return Matrix(
        (ridge::phi_transpose_apply(a, delta, inner).array() / omega_diag.array()).matrix());
  };
  return spectral_norm_estimate(apply, apply_t, a.rows(), a.cols(), 100, seed);
}

inline double weighted_quad(const Matrix& left, const Matrix& omega_diag, const Matrix& right) {
  return (left.array() * right.array() / omega_diag.array()).sum();
}

}  // namespace detail

/// Ridge regression:
///   vec(X~)^T Omega vec(X~) - vec(X)^T Omega vec(X)
///     <= |y^T Om~^-1 Lam~ y|^2 ||Om~^-1 Phi Om~^-1|| / (16 beta^2)
///      + |y^T Om^-1 Lam y|^2 ||Om^-1 Phi Om^-1|| / (16 beta^2) + 4c,
/// where y^T Om^-1 Lam y reads as (Lam^T y)^T Om^-1 (Lam^T y) and the operator norms
/// are spectral norms.
inline BoundReport ridge_shift_check(const Matrix& a, const Matrix& delta, const Vector& y,
                                  double gamma, double beta, double c, const Matrix& x_star,
                                  const Matrix& x_tilde,
                                  std::uint64_t seed = kDefaultPowerSeed) {
  detail::require_positive_beta(beta);
  if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
  require_shape(delta, a.rows(), a.cols(), "ridge_shift_check: delta");
  require_shape(x_star, a.rows(), a.cols(), "ridge_shift_check: X*");
  require_shape(x_tilde, a.rows(), a.cols(), "ridge_shift_check: X~*");
  if (y.size() != a.rows()) throw DimensionError("ridge_shift_check: y must have n entries");

  const Matrix a_new = a + delta;
  const Matrix omega = ridge::omega(a, gamma);
  const Matrix omega_new = ridge::omega(a_new, gamma);
  const Matrix lin = ridge::lambda_adjoint(a, y);
  const Matrix lin_new = ridge::lambda_adjoint(a_new, y);

  const double lhs = (omega.array() * x_tilde.array().square()).sum() -
                     (omega.array() * x_star.array().square()).sum();
  const double quad_new = detail::weighted_quad(lin_new, omega_new, lin_new);
  const double quad = detail::weighted_quad(lin, omega, lin);
  const double norm_new = detail::scaled_phi_norm(a, delta, omega_new, seed);
  const double norm_old = detail::scaled_phi_norm(a, delta, omega, seed);
  const double scale = 1.0 / (16.0 * beta * beta);
  const double term_new = scale * quad_new * quad_new * norm_new;
  const double term_old = scale * quad * quad * norm_old;
  auto r = detail::make_report("ridge_shift", lhs, term_new + term_old + 4.0 * c,
                               {beta, c, a.norm(), delta.norm()});
  r.terms = {{"evolved_term", term_new},
             {"original_term", term_old},
             {"four_c", 4.0 * c},
             {"evolved_phi_norm", norm_new},
             {"original_phi_norm", norm_old}};
  return r;
}

/// Ridge regression: ||vec(Q^T lambda~)||_s <= y^T Om~^-1 Lam y / (4 beta).
/// Both Lam and Lam~ are evaluated on the right; the larger value is the operative bound.
inline BoundReport ridge_dual_check(const EdgeIncidence& q, const Matrix& lam_tilde, Norm s,
                                const Matrix& a, const Matrix& delta, const Vector& y,
                                double gamma, double beta) {
  detail::require_positive_beta(beta);
  if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
  require_shape(delta, a.rows(), a.cols(), "ridge_dual_check: delta");
  if (y.size() != a.rows()) throw DimensionError("ridge_dual_check: y must have n entries");
  const Matrix a_new = a + delta;
  const Matrix omega_new = ridge::omega(a_new, gamma);
  const Matrix lin = ridge::lambda_adjoint(a, y);
  const Matrix lin_new = ridge::lambda_adjoint(a_new, y);
  const double stated = detail::weighted_quad(lin, omega_new, lin) / (4.0 * beta);
  const double derived = detail::weighted_quad(lin_new, omega_new, lin_new) / (4.0 * beta);
  auto r = detail::make_report("ridge_dual", dual_regularizer_value(q, lam_tilde, s), std::max(stated, derived),
                               {beta, 0.0, a.norm(), delta.norm()});
  r.terms = {{"rhs_original_lambda", stated}, {"rhs_evolved_lambda", derived}};
  return r;
}

}  // namespace sco
