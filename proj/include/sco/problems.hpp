#pragma once

#include <concepts>
#include <string>
#include <utility>
#include <variant>

#include "sco/dataset.hpp"
#include "sco/incidence.hpp"

namespace sco {

// A task is described by its loss f(X; A). The dual machinery only ever evaluates the
// conjugate along f*(-B) with B = Q^T lambda (n x d), so problems expose their
// conjugate as a function of B. Constants independent of lambda are dropped from
// conjugate_at() and reported separately by conjugate_constant().
//
// conjugate_column / conjugate_gradient_column evaluate the same quantities for one
// feature column; the conjugate must be a sum of per-column terms.
template <class P>
concept DualProblem = requires(const P& p, const Matrix& m, const Vector& v, Index j) {
  { p.row_count() } -> std::convertible_to<Index>;
  { p.feature_count() } -> std::convertible_to<Index>;
  { p.primal_value(m) } -> std::convertible_to<double>;
  { p.conjugate_at(m) } -> std::convertible_to<double>;
  { p.conjugate_gradient_at(m) } -> std::convertible_to<Matrix>;
  { p.conjugate_column(j, v) } -> std::convertible_to<double>;
  { p.conjugate_gradient_column(j, v) } -> std::convertible_to<Vector>;
  { p.recover_from(m) } -> std::convertible_to<Matrix>;
  { p.conjugate_constant() } -> std::convertible_to<double>;
  { p.curvature() } -> std::convertible_to<double>;
};

/// f(X; A) = ||X - A||_F^2.
class ConvexClustering {
 public:
  explicit ConvexClustering(Matrix data) : data_(std::move(data)) {
    if (!all_finite(data_)) throw ValidationError("convex clustering: non-finite data");
  }
  explicit ConvexClustering(const Dataset& d) : ConvexClustering(d.values()) {}

  Index row_count() const noexcept { return data_.rows(); }
  Index feature_count() const noexcept { return data_.cols(); }
  const Matrix& data() const noexcept { return data_; }

  double primal_value(const Matrix& x) const {
    require_shape(x, data_.rows(), data_.cols(), "primal_value");
    return (x - data_).squaredNorm();
  }

  // f*(-B) = -<A, B> + ||B||^2 / 4.
  double conjugate_at(const Matrix& b) const {
    require_shape(b, data_.rows(), data_.cols(), "conjugate_at");
    return -vec(data_).dot(vec(b)) + 0.25 * b.squaredNorm();
  }

  Matrix conjugate_gradient_at(const Matrix& b) const {
    require_shape(b, data_.rows(), data_.cols(), "conjugate_gradient_at");
    return -data_ + 0.5 * b;
  }

  double conjugate_column(Index j, const Vector& b) const {
    return -data_.col(j).dot(b) + 0.25 * b.squaredNorm();
  }
  Vector conjugate_gradient_column(Index j, const Vector& b) const {
    return -data_.col(j) + 0.5 * b;
  }

  // Stationarity 2(X - A) + B = 0.
  Matrix recover_from(const Matrix& b) const {
    require_shape(b, data_.rows(), data_.cols(), "recover_from");
    return data_ - 0.5 * b;
  }

  double conjugate_constant() const noexcept { return 0.0; }
  /// Lipschitz constant of the conjugate gradient with respect to B.
  double curvature() const noexcept { return 0.5; }

 private:
  Matrix data_;
};

namespace ridge {

/// Diagonal of Omega = diag(vec(A))^2 + gamma I, stored as an n x d matrix.
inline Matrix omega(const Matrix& a, double gamma) {
  return (a.array().square() + gamma).matrix();
}

/// Lambda z = (1_{1xd} (x) I_n) diag(vec(A)) vec(z): row sums of A .* z, length n.
inline Vector lambda_apply(const Matrix& a, const Matrix& z) {
  require_shape(z, a.rows(), a.cols(), "lambda_apply");
  return (a.array() * z.array()).rowwise().sum().matrix();
}

/// Lambda^T y as an n x d matrix: entry (i, j) = A_ij y_i.
inline Matrix lambda_adjoint(const Matrix& a, const Vector& y) {
  if (y.size() != a.rows()) throw DimensionError("lambda_adjoint: y must have n entries");
  return (a.array().colwise() * y.array()).matrix();
}

/// Phi v with Phi = 2 diag(vec(Delta)) (1_{dxd} (x) I_n) diag(vec(A)):
/// (Phi v)_ij = 2 Delta_ij sum_l A_il v_il.
inline Matrix phi_apply(const Matrix& a, const Matrix& delta, const Matrix& v) {
  require_shape(delta, a.rows(), a.cols(), "phi_apply");
  require_shape(v, a.rows(), a.cols(), "phi_apply");
  const Vector row_dot = 2.0 * (a.array() * v.array()).rowwise().sum();
  return (delta.array().colwise() * row_dot.array()).matrix();
}

/// Phi^T v: (Phi^T v)_il = A_il sum_j 2 Delta_ij v_ij.
inline Matrix phi_transpose_apply(const Matrix& a, const Matrix& delta, const Matrix& v) {
  require_shape(delta, a.rows(), a.cols(), "phi_transpose_apply");
  require_shape(v, a.rows(), a.cols(), "phi_transpose_apply");
  const Vector row_dot = 2.0 * (delta.array() * v.array()).rowwise().sum();
  return (a.array().colwise() * row_dot.array()).matrix();
}

}  // namespace ridge

/// Diagonal ridge surrogate with the constant dropped:
/// f(X) = vec(X)^T Omega vec(X) - 2 y^T Lambda vec(X).
class RidgeRegression {
 public:
  RidgeRegression(Matrix data, Vector targets, double gamma)
      : data_(std::move(data)), targets_(std::move(targets)), gamma_(gamma) {
    if (!(gamma_ > 0.0) || !std::isfinite(gamma_)) {
      throw ParameterError("ridge regression: gamma must be positive");
    }
    if (targets_.size() != data_.rows()) {
      throw DimensionError("ridge regression: targets must have n entries");
    }
    if (!all_finite(data_) || !all_finite(targets_)) {
      throw ValidationError("ridge regression: non-finite data");
    }
    omega_ = ridge::omega(data_, gamma_);
    linear_ = ridge::lambda_adjoint(data_, targets_);
  }
  RidgeRegression(const Dataset& d, double gamma)
      : RidgeRegression(d.values(), d.targets() ? *d.targets() : Vector(),
                        gamma) {}

  Index row_count() const noexcept { return data_.rows(); }
  Index feature_count() const noexcept { return data_.cols(); }
  const Matrix& data() const noexcept { return data_; }
  const Vector& targets() const noexcept { return targets_; }
  double gamma() const noexcept { return gamma_; }
  /// Diagonal of Omega as n x d.
  const Matrix& omega() const noexcept { return omega_; }
  /// Lambda^T y as n x d.
  const Matrix& linear_term() const noexcept { return linear_; }

  double primal_value(const Matrix& x) const {
    require_shape(x, data_.rows(), data_.cols(), "primal_value");
    return (omega_.array() * x.array().square()).sum() - 2.0 * vec(linear_).dot(vec(x));
  }

  // f*(-B) = B^T Omega^-1 B / 4 - (Lambda^T y)^T Omega^-1 B + const.
  double conjugate_at(const Matrix& b) const {
    require_shape(b, data_.rows(), data_.cols(), "conjugate_at");
    return (0.25 * b.array().square() / omega_.array() -
            linear_.array() * b.array() / omega_.array())
        .sum();
  }

  Matrix conjugate_gradient_at(const Matrix& b) const {
    require_shape(b, data_.rows(), data_.cols(), "conjugate_gradient_at");
    return ((0.5 * b.array() - linear_.array()) / omega_.array()).matrix();
  }

  double conjugate_column(Index j, const Vector& b) const {
    return (0.25 * b.array().square() / omega_.col(j).array() -
            linear_.col(j).array() * b.array() / omega_.col(j).array())
        .sum();
  }
  Vector conjugate_gradient_column(Index j, const Vector& b) const {
    return ((0.5 * b.array() - linear_.col(j).array()) / omega_.col(j).array()).matrix();
  }

  // Stationarity 2 Omega vec(X) - 2 Lambda^T y + vec(B) = 0.
  Matrix recover_from(const Matrix& b) const {
    require_shape(b, data_.rows(), data_.cols(), "recover_from");
    return ((linear_.array() - 0.5 * b.array()) / omega_.array()).matrix();
  }

  /// (Lambda^T y)^T Omega^-1 (Lambda^T y), the lambda-free part of the conjugate.
  double conjugate_constant() const {
    return (linear_.array().square() / omega_.array()).sum();
  }
  double curvature() const { return 0.5 / omega_.minCoeff(); }

 private:
  Matrix data_;
  Vector targets_;
  double gamma_;
  Matrix omega_;
  Matrix linear_;
};

static_assert(DualProblem<ConvexClustering>);
static_assert(DualProblem<RidgeRegression>);

enum class Task { ConvexClustering, Ridge };

inline Task parse_task(std::string_view text) {
  if (text == "cc" || text == "convex-clustering") return Task::ConvexClustering;
  if (text == "ridge") return Task::Ridge;
  throw ParameterError("task must be 'cc' or 'ridge'");
}

inline std::string to_string(Task t) { return t == Task::Ridge ? "ridge" : "cc"; }

struct TaskSpec {
  Task task = Task::ConvexClustering;
  double gamma = 5.0;
};

using AnyProblem = std::variant<ConvexClustering, RidgeRegression>;

inline AnyProblem make_problem(const TaskSpec& spec, const Dataset& data) {
  if (spec.task == Task::Ridge) {
    if (!data.targets()) throw ValidationError("ridge regression requires targets");
    return RidgeRegression(data, spec.gamma);
  }
  return ConvexClustering(data);
}

// Lambda-space views of the problem through Q.

template <DualProblem P>
double primal_value(const P& problem, const Matrix& x) {
  return problem.primal_value(x);
}

/// f(X) + ||Q X||_{1,p}: the full primal objective.
template <DualProblem P>
double primal_objective(const P& problem, const EdgeIncidence& q, const Matrix& x, Norm p) {
  return problem.primal_value(x) + sum_norms(q.apply_Q(x), p);
}

/// f*(-(I (x) Q)^T vec(lambda)) with lambda-free constants dropped.
template <DualProblem P>
double conjugate_value(const P& problem, const EdgeIncidence& q, const Matrix& lam) {
  return problem.conjugate_at(q.apply_QT(lam));
}

/// Same, with the dropped constant restored.
template <DualProblem P>
double full_conjugate_value(const P& problem, const EdgeIncidence& q, const Matrix& lam) {
  return conjugate_value(problem, q, lam) + problem.conjugate_constant();
}

template <DualProblem P>
Matrix conjugate_gradient(const P& problem, const EdgeIncidence& q, const Matrix& lam) {
  return q.apply_Q(problem.conjugate_gradient_at(q.apply_QT(lam)));
}

template <DualProblem P>
Matrix recover_primal(const P& problem, const EdgeIncidence& q, const Matrix& lam) {
  return problem.recover_from(q.apply_QT(lam));
}

}  // namespace sco
