#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace sco {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Bad scalar parameter (out of range, wrong selector, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operand shapes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data violates a documented invariant (non-finite entries, malformed files).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The numerics produced something unusable (NaN/inf in an iterate).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Norm selector for p, q and s. Only 1, 2 and infinity are supported.
enum class Norm { L1, L2, Inf };

/// Dual exponent: 1/p + 1/q = 1.
constexpr Norm dual_norm(Norm p) noexcept {
  switch (p) {
    case Norm::L1: return Norm::Inf;
    case Norm::L2: return Norm::L2;
    case Norm::Inf: return Norm::L1;
  }
  return Norm::L2;
}

inline Norm parse_norm(std::string_view text) {
  if (text == "1") return Norm::L1;
  if (text == "2") return Norm::L2;
  if (text == "inf" || text == "Inf" || text == "infinity") return Norm::Inf;
  throw ParameterError("norm selector must be one of 1, 2, inf (got '" + std::string(text) + "')");
}

inline std::string to_string(Norm p) {
  switch (p) {
    case Norm::L1: return "1";
    case Norm::L2: return "2";
    case Norm::Inf: return "inf";
  }
  return "?";
}

template <class Derived>
double norm_of(const Eigen::MatrixBase<Derived>& v, Norm p) {
  switch (p) {
    case Norm::L1: return v.template lpNorm<1>();
    case Norm::L2: return v.norm();
    case Norm::Inf: return v.size() == 0 ? 0.0 : v.template lpNorm<Eigen::Infinity>();
  }
  throw ParameterError("invalid norm selector");
}

/// Column-stacking vectorization: a view, no copy. Eigen storage is column-major,
/// so the memory layout of an n x d matrix is exactly vec().
inline Eigen::Map<const Vector> vec(const Matrix& m) { return {m.data(), m.size()}; }
inline Eigen::Map<Vector> vec(Matrix& m) { return {m.data(), m.size()}; }

/// Inverse of vec() for an n x d matrix.
inline Matrix unvec(const Vector& v, Index rows, Index cols) {
  if (v.size() != rows * cols) throw DimensionError("unvec: length does not match rows*cols");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

template <class Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

inline void require_shape(const Matrix& m, Index rows, Index cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                         std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
}

}  // namespace sco
