#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sco/admm.hpp"
#include "sco/graph.hpp"

namespace sco {

inline constexpr double kDefaultThreshold = 10.0;

struct Snapshot {
  std::size_t index = 0;
  Matrix values;
  std::optional<Vector> targets;
};

enum class Action { Keep, Resolve };

inline std::string to_string(Action a) { return a == Action::Keep ? "keep" : "resolve"; }

struct EvolutionDecision {
  std::size_t index = 0;
  double delta_metric = 0.0;
  double threshold = 0.0;
  Action action = Action::Keep;
  /// Filled when action == Resolve.
  int solve_iters = 0;
  double wall_ms = 0.0;
  std::optional<SolveStatus> solve_status;
};

/// A solver failure while handling a snapshot.
class SessionError : public std::runtime_error {
 public:
  SessionError(std::size_t index, const std::string& what, bool bad_input = false)
      : std::runtime_error("snapshot " + std::to_string(index) + ": " + what),
        index_(index),
        bad_input_(bad_input) {}
  std::size_t snapshot_index() const noexcept { return index_; }
  /// The snapshot itself was invalid, as opposed to the solver failing on it.
  bool bad_input() const noexcept { return bad_input_; }

 private:
  std::size_t index_;
  bool bad_input_;
};

/// |f*(-Q^T lambda*; A_new) - f*(-Q^T lambda*; A)| at a fixed lambda*, with every
/// data-dependent term of the conjugate included.
template <DualProblem P>
double delta_metric(const P& accepted, const P& updated, const EdgeIncidence& q,
                    const Matrix& lam_star) {
  if (accepted.row_count() != updated.row_count() ||
      accepted.feature_count() != updated.feature_count()) {
    throw DimensionError("delta_metric: datasets differ in shape");
  }
  return std::abs(full_conjugate_value(updated, q, lam_star) -
                  full_conjugate_value(accepted, q, lam_star));
}

inline double delta_metric(const AnyProblem& accepted, const AnyProblem& updated,
                           const EdgeIncidence& q, const Matrix& lam_star) {
  return std::visit(
      [&](const auto& a, const auto& b) -> double {
        using A = std::decay_t<decltype(a)>;
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<A, B>) {
          return delta_metric(a, b, q, lam_star);
        } else {
          throw ParameterError("delta_metric: task mismatch");
        }
      },
      accepted, updated);
}

struct SessionOptions {
  /// Rebuild the k-NN graph from the new data on every resolve.
  bool rebuild_graph = false;
  Index k = 10;
  double weight_cap = kDefaultWeightCap;
};

/// Sequential driver: solve once, then for every arriving snapshot compare Delta_f*
/// against the threshold and re-solve (warm-started) only when it is reached.
class EvolutionSession {
 public:
  EvolutionSession(TaskSpec task, Dataset initial, VariableGraph graph, SolverConfig config,
                   double threshold, SessionOptions options = {})
      : task_(task),
        accepted_(std::move(initial)),
        graph_(std::move(graph)),
        config_(config),
        threshold_(threshold),
        options_(options) {
    if (!(threshold_ >= 0.0)) throw ParameterError("threshold c must be >= 0");
    config_.validate();
    problem_ = make_problem(task_, accepted_);
    q_ = EdgeIncidence(graph_, config_.alpha);
    try {
      last_ = solve_dual(problem_, q_, config_);
    } catch (const std::invalid_argument& e) {
      throw SessionError(0, e.what(), true);
    } catch (const std::exception& e) {
      throw SessionError(0, e.what());
    }
    solve_count_ = 1;
  }

  EvolutionDecision observe(const Snapshot& snap) {
    EvolutionDecision decision;
    decision.index = snap.index;
    decision.threshold = threshold_;
    try {
      const std::optional<Vector> targets = snap.targets ? snap.targets : accepted_.targets();
      Dataset candidate(snap.values, targets);
      if (candidate.row_count() != accepted_.row_count() ||
          candidate.feature_count() != accepted_.feature_count()) {
        throw DimensionError("snapshot shape differs from the session dataset");
      }
      if (!differs(candidate)) {
        decision.delta_metric = 0.0;
        decision.action = Action::Keep;
        return decision;
      }
      AnyProblem updated = make_problem(task_, candidate);
      decision.delta_metric = delta_metric(problem_, updated, q_, last_.state.lam);
      if (decision.delta_metric < threshold_) {
        decision.action = Action::Keep;
        return decision;
      }
      decision.action = Action::Resolve;
      accepted_ = std::move(candidate);
      problem_ = std::move(updated);
      std::optional<DualState> warm = last_.state;
      if (options_.rebuild_graph) {
        graph_ = build_knn_graph(accepted_, options_.k, options_.weight_cap);
        q_ = EdgeIncidence(graph_, config_.alpha);
        warm.reset();
      }
      last_ = solve_dual(problem_, q_, config_, warm);
      ++solve_count_;
      decision.solve_iters = last_.iterations;
      decision.wall_ms = last_.wall_ms;
      decision.solve_status = last_.status;
    } catch (const std::invalid_argument& e) {
      throw SessionError(snap.index, e.what(), true);
    } catch (const std::exception& e) {
      throw SessionError(snap.index, e.what());
    }
    return decision;
  }

  const Dataset& accepted() const noexcept { return accepted_; }
  const AnyProblem& problem() const noexcept { return problem_; }
  const EdgeIncidence& incidence() const noexcept { return q_; }
  const VariableGraph& graph() const noexcept { return graph_; }
  const SolveResult& last_solve() const noexcept { return last_; }
  const SolverConfig& config() const noexcept { return config_; }
  int solve_count() const noexcept { return solve_count_; }

 private:
  bool differs(const Dataset& candidate) const {
    if (candidate.values() != accepted_.values()) return true;
    if (candidate.targets().has_value() != accepted_.targets().has_value()) return true;
    return candidate.targets() && *candidate.targets() != *accepted_.targets();
  }

  TaskSpec task_;
  Dataset accepted_;
  VariableGraph graph_;
  SolverConfig config_;
  double threshold_;
  SessionOptions options_;
  AnyProblem problem_ = ConvexClustering(Matrix::Zero(1, 1));
  EdgeIncidence q_;
  SolveResult last_;
  int solve_count_ = 0;
};

/// Runs a whole stream; one decision per snapshot (the initial solve is not a decision).
inline std::vector<EvolutionDecision> run_session(const TaskSpec& task, const Snapshot& initial,
                                                  std::span<const Snapshot> stream,
                                                  const VariableGraph& graph,
                                                  const SolverConfig& config, double threshold,
                                                  SessionOptions options = {}) {
  EvolutionSession session(task, Dataset(initial.values, initial.targets), graph, config,
                           threshold, options);
  std::vector<EvolutionDecision> out;
  out.reserve(stream.size());
  for (const Snapshot& s : stream) out.push_back(session.observe(s));
  return out;
}

}  // namespace sco
