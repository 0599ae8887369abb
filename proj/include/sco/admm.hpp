#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "sco/incidence.hpp"
#include "sco/problems.hpp"
#include "sco/prox.hpp"

namespace sco {

struct SolverConfig {
  double alpha = 1.0;
  double beta = 5.0;
  double rho = 1.0;
  Norm p = Norm::L2;
  Norm q = Norm::L2;
  Norm s = Norm::L1;
  int outer_max_iters = 2000;
  int inner_max_iters = 5000;
  double eps_abs = 1e-6;
  double eps_rel = 1e-4;
  double inner_tol = 1e-9;
  /// Column-parallel lambda update; only valid for q = inf.
  bool parallel = false;
  /// Worker threads for the parallel update; 0 picks hardware concurrency.
  unsigned workers = 0;
  std::uint64_t seed = kDefaultPowerSeed;

  void validate() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ParameterError("alpha must be >= 0");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw ParameterError("beta must be >= 0");
    if (!positive(rho)) throw ParameterError("rho must be > 0");
    if (q != dual_norm(p)) throw ParameterError("q must be the dual exponent of p");
    if (outer_max_iters < 1 || inner_max_iters < 1) {
      throw ParameterError("iteration caps must be >= 1");
    }
    if (!positive(eps_abs) || !positive(eps_rel) || !positive(inner_tol)) {
      throw ParameterError("tolerances must be > 0");
    }
    if (parallel && q != Norm::Inf) {
      throw ParameterError("parallel lambda updates require q = inf (p = 1)");
    }
  }

  /// Sets p and the matching q together.
  SolverConfig& with_p(Norm norm) {
    p = norm;
    q = dual_norm(norm);
    return *this;
  }
};

/// (lambda, u, mu): lambda is m x d, u and mu have length n*d.
struct DualState {
  Matrix lam;
  Vector u;
  Vector mu;
  int iteration = 0;

  static DualState zero(Index m, Index n, Index d) {
    return {Matrix::Zero(m, d), Vector::Zero(n * d), Vector::Zero(n * d), 0};
  }
};

struct TraceEntry {
  int iter = 0;
  double primal_res = 0.0;
  double dual_res = 0.0;
  double h_step = 0.0;
};

struct ConvergenceTrace {
  std::vector<TraceEntry> entries;

  void write_csv(std::ostream& os) const {
    os << "iter,primal_res,dual_res,h_step\n";
    os.precision(17);
    for (const auto& e : entries) {
      os << e.iter << ',' << e.primal_res << ',' << e.dual_res << ',' << e.h_step << '\n';
    }
  }
};

enum class SolveStatus { Converged, MaxIterations };

inline std::string to_string(SolveStatus s) {
  return s == SolveStatus::Converged ? "converged" : "max-iterations";
}

struct SolveResult {
  DualState state;
  Matrix primal;
  ConvergenceTrace trace;
  SolveStatus status = SolveStatus::MaxIterations;
  int iterations = 0;
  double wall_ms = 0.0;

  bool converged() const noexcept { return status == SolveStatus::Converged; }
};

/// ||w^t - w^{t+1}||_H^2 with H = blockdiag(0, rho I, I / rho) over (lambda; u; mu).
inline double h_norm_step(const DualState& prev, const DualState& next, double rho) {
  return rho * (next.u - prev.u).squaredNorm() + (next.mu - prev.mu).squaredNorm() / rho;
}

/// omega = mu / rho + vec(Q^T lambda), then u = prox_{(beta/rho)||.||_s}(omega).
inline Vector u_step(const DualState& state, const EdgeIncidence& q, const SolverConfig& cfg) {
  const Matrix b = q.apply_QT(state.lam);
  Vector omega = state.mu / cfg.rho + vec(b);
  if (cfg.beta == 0.0) return omega;
  return prox_norm(omega, cfg.beta / cfg.rho, cfg.s);
}

/// mu + rho (vec(Q^T lambda) - u).
inline Vector mu_step(const DualState& state, const EdgeIncidence& q, const SolverConfig& cfg) {
  const Matrix b = q.apply_QT(state.lam);
  return state.mu + cfg.rho * (vec(b) - state.u);
}

/// Regularized dual objective f*(-B) + beta ||vec(B)||_s with the constant restored.
template <DualProblem P>
double regularized_dual_objective(const P& problem, const EdgeIncidence& q, const Matrix& lam,
                                  double beta, Norm s) {
  const Matrix b = q.apply_QT(lam);
  return problem.conjugate_at(b) + problem.conjugate_constant() + beta * norm_of(vec(b), s);
}

inline unsigned resolve_workers(unsigned requested, Index blocks) {
  unsigned w = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SCO_THREADS"); env != nullptr) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) w = std::min<unsigned>(w, static_cast<unsigned>(cap));
  }
  w = std::min<unsigned>(w, static_cast<unsigned>(std::max<Index>(blocks, 1)));
  return std::max(1u, w);
}

namespace detail {

/// Accelerated projected gradient with backtracking on L and adaptive restart.
/// Stops when the gradient-mapping norm L ||y - P(y - g/L)|| drops below tol.
template <class Objective, class Gradient, class Project>
Matrix fista(Matrix x, const Objective& objective, const Gradient& gradient,
             const Project& project, double lipschitz, int max_iters, double tol) {
  double l = std::max(lipschitz, 1e-300);
  Matrix y = x;
  double t = 1.0;
  for (int it = 0; it < max_iters; ++it) {
    const Matrix g = gradient(y);
    const double fy = objective(y);
    Matrix x_new;
    Matrix step;
    for (int bt = 0; bt < 60; ++bt) {
      x_new = y - g / l;
      project(x_new);
      step = x_new - y;
      const double model = fy + vec(g).dot(vec(step)) + 0.5 * l * step.squaredNorm();
      if (objective(x_new) <= model + 1e-12 * (1.0 + std::abs(fy))) break;
      l *= 2.0;
    }
    if (l * step.norm() <= tol) return x_new;
    const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const Matrix dx = x_new - x;
    if (vec(step).dot(vec(dx)) < 0.0) {
      // momentum points against the gradient step; restart
      y = x_new;
      t = 1.0;
    } else {
      y = x_new + ((t - 1.0) / t_new) * dx;
      t = t_new;
    }
    x = std::move(x_new);
  }
  return x;
}

}  // namespace detail

/// ADMM on the regularized dual: lambda-step by FISTA over the l_q balls, closed-form
/// u-step, ascent on mu. Holds references; the problem and Q must outlive it.
template <DualProblem P>
class AdmmSolver {
 public:
  AdmmSolver(const P& problem, const EdgeIncidence& q, SolverConfig config)
      : problem_(problem), q_(q), config_(config) {
    config_.validate();
    if (q.col_count() != problem.row_count()) {
      throw DimensionError("Q column count must equal the number of instances");
    }
    sigma_ = operator_norm_estimate(q, 50, config_.seed);
  }

  const SolverConfig& config() const noexcept { return config_; }
  Index m() const noexcept { return q_.row_count(); }
  Index n() const noexcept { return problem_.row_count(); }
  Index d() const noexcept { return problem_.feature_count(); }

  /// Step-size constant for the lambda subproblem: (curvature + rho) * sigma_max(Q)^2.
  double lipschitz() const { return (problem_.curvature() + config_.rho) * sigma_ * sigma_; }

  /// h(lambda) + <mu, vec(Q^T lambda)> + rho/2 ||vec(Q^T lambda) - u||^2.
  double subproblem_objective(const DualState& state, const Matrix& lam) const {
    const Matrix b = q_.apply_QT(lam);
    return problem_.conjugate_at(b) + state.mu.dot(vec(b)) +
           0.5 * config_.rho * (vec(b) - state.u).squaredNorm();
  }

  /// The column-j block of subproblem_objective; blocks sum to the full objective.
  double block_objective(const DualState& state, Index j, const Vector& lam_col) const {
    const Vector b = q_.apply_QT(lam_col);
    const auto mu_j = state.mu.segment(j * n(), n());
    const auto u_j = state.u.segment(j * n(), n());
    return problem_.conjugate_column(j, b) + mu_j.dot(b) +
           0.5 * config_.rho * (b - u_j).squaredNorm();
  }

  /// Joint update of all of lambda.
  Matrix serial_lambda_step(const DualState& state) const {
    Matrix start = state.lam;
    project_rows(start, config_.q);
    if (m() == 0 || sigma_ == 0.0) return start;
    const Matrix mu_mat = unvec(state.mu, n(), d());
    const Matrix u_mat = unvec(state.u, n(), d());
    auto objective = [&](const Matrix& lam) { return subproblem_objective(state, lam); };
    auto gradient = [&](const Matrix& lam) {
      const Matrix b = q_.apply_QT(lam);
      const Matrix gb = problem_.conjugate_gradient_at(b) + mu_mat + config_.rho * (b - u_mat);
      return Matrix(q_.apply_Q(gb));
    };
    auto project = [&](Matrix& lam) { project_rows(lam, config_.q); };
    return detail::fista(std::move(start), objective, gradient, project, lipschitz(),
                         config_.inner_max_iters, config_.inner_tol);
  }

  /// q = inf only: the box constraint and (I_d (x) Q) both split by feature column, so
  /// the d column subproblems are solved independently on `workers` threads. Each block
  /// is solved by the same deterministic procedure whatever the worker count.
  Matrix parallel_lambda_step(const DualState& state, unsigned workers = 0) const {
    if (config_.q != Norm::Inf) {
      throw ParameterError("parallel_lambda_step requires q = inf");
    }
    Matrix out(m(), d());
    const unsigned w = resolve_workers(workers != 0 ? workers : config_.workers, d());
    auto solve_block = [&](Index j) { out.col(j) = solve_column(state, j); };
    if (w <= 1) {
      for (Index j = 0; j < d(); ++j) solve_block(j);
      return out;
    }
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (unsigned t = 0; t < w; ++t) {
      pool.emplace_back([&, t] {
        for (Index j = t; j < d(); j += w) solve_block(j);
      });
    }
    for (auto& th : pool) th.join();
    return out;
  }

  Matrix lambda_step(const DualState& state) const {
    if (config_.parallel) return parallel_lambda_step(state, config_.workers);
    return serial_lambda_step(state);
  }

  SolveResult solve(const std::optional<DualState>& warm_start = std::nullopt) const {
    const auto started = std::chrono::steady_clock::now();
    SolveResult result;
    DualState state = warm_start ? *warm_start : DualState::zero(m(), n(), d());
    if (state.lam.rows() != m() || state.lam.cols() != d() || state.u.size() != n() * d() ||
        state.mu.size() != n() * d()) {
      throw DimensionError("warm start does not match the problem dimensions");
    }
    state.iteration = 0;

    if (m() == 0 || q_.is_zero()) {
      state = DualState::zero(m(), n(), d());
      result.state = state;
      result.primal = problem_.recover_from(Matrix::Zero(n(), d()));
      result.status = SolveStatus::Converged;
      result.wall_ms = elapsed_ms(started);
      return result;
    }

    const double sqrt_nd = std::sqrt(static_cast<double>(n() * d()));
    const double sqrt_md = std::sqrt(static_cast<double>(m() * d()));
    for (int t = 0; t < config_.outer_max_iters; ++t) {
      const DualState prev = state;
      state.lam = lambda_step(state);
      state.u = u_step(state, q_, config_);
      state.mu = mu_step(state, q_, config_);
      state.iteration = t + 1;

      const Matrix b = q_.apply_QT(state.lam);
      const double primal_res = (vec(b) - state.u).norm();
      const double dual_res =
          config_.rho * q_.apply_Q(unvec(state.u - prev.u, n(), d())).norm();
      const double h_step = h_norm_step(prev, state, config_.rho);
      result.trace.entries.push_back({t + 1, primal_res, dual_res, h_step});
      if (!std::isfinite(primal_res) || !std::isfinite(dual_res) || !state.lam.allFinite()) {
        throw NumericError("ADMM iterate became non-finite at iteration " +
                           std::to_string(t + 1));
      }

      const double eps_pri =
          config_.eps_abs * sqrt_nd + config_.eps_rel * std::max(b.norm(), state.u.norm());
      const double eps_dual =
          config_.eps_abs * sqrt_md +
          config_.eps_rel * q_.apply_Q(unvec(state.mu, n(), d())).norm();
      result.iterations = t + 1;
      if (primal_res <= eps_pri && dual_res <= eps_dual) {
        result.status = SolveStatus::Converged;
        break;
      }
    }
    result.primal = recover_primal(problem_, q_, state.lam);
    result.state = std::move(state);
    result.wall_ms = elapsed_ms(started);
    return result;
  }

 private:
  static double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
        .count();
  }

  Vector solve_column(const DualState& state, Index j) const {
    Matrix start = state.lam.col(j).cwiseMax(-1.0).cwiseMin(1.0);
    if (m() == 0 || sigma_ == 0.0) return start;
    const Vector mu_j = state.mu.segment(j * n(), n());
    const Vector u_j = state.u.segment(j * n(), n());
    auto objective = [&](const Matrix& lam) {
      return block_objective(state, j, Vector(lam.col(0)));
    };
    auto gradient = [&](const Matrix& lam) {
      const Vector b = q_.apply_QT(lam);
      const Vector gb =
          problem_.conjugate_gradient_column(j, b) + mu_j + config_.rho * (b - u_j);
      return Matrix(q_.apply_Q(gb));
    };
    auto project = [](Matrix& lam) { lam = lam.cwiseMax(-1.0).cwiseMin(1.0); };
    return detail::fista(std::move(start), objective, gradient, project, lipschitz(),
                         config_.inner_max_iters, config_.inner_tol);
  }

  const P& problem_;
  const EdgeIncidence& q_;
  SolverConfig config_;
  double sigma_ = 0.0;
};

template <DualProblem P>
Matrix lambda_step(const P& problem, const EdgeIncidence& q, const DualState& state,
                   const SolverConfig& cfg) {
  return AdmmSolver<P>(problem, q, cfg).lambda_step(state);
}

template <DualProblem P>
Matrix parallel_lambda_step(const P& problem, const EdgeIncidence& q, const DualState& state,
                            const SolverConfig& cfg, unsigned workers = 0) {
  return AdmmSolver<P>(problem, q, cfg).parallel_lambda_step(state, workers);
}

template <DualProblem P>
SolveResult solve_dual(const P& problem, const EdgeIncidence& q, const SolverConfig& cfg,
                       const std::optional<DualState>& warm_start = std::nullopt) {
  return AdmmSolver<P>(problem, q, cfg).solve(warm_start);
}

inline SolveResult solve_dual(const AnyProblem& problem, const EdgeIncidence& q,
                              const SolverConfig& cfg,
                              const std::optional<DualState>& warm_start = std::nullopt) {
  return std::visit([&](const auto& p) { return solve_dual(p, q, cfg, warm_start); }, problem);
}

}  // namespace sco
