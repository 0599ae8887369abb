#include "cli.hpp"

#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sco/sco.hpp"

namespace sco::cli {
namespace {

using io::json;

struct Options {
  std::string task = "cc";
  double alpha = 1.0;
  double beta = 5.0;
  double gamma = 5.0;
  double rho = 1.0;
  std::string p = "2";
  std::string s = "1";
  double c = kDefaultThreshold;
  Index k = 10;
  bool parallel = false;
  std::uint64_t seed = kDefaultPowerSeed;
  bool rebuild_graph = false;
  std::string alphas;
  std::string out;
  std::string data;
  std::string graph;
  bool target_last = false;
  std::string trace;
  int max_iters = 2000;
  double eps_abs = 1e-6;
  double eps_rel = 1e-4;
  std::optional<double> eps_fuse;
  std::string summary;
  std::string snapshots;
  int synthetic = 0;
  double sigma = 0.1;
  std::string delta;
  std::string bounds_out;
};

struct Resolved {
  TaskSpec task;
  SolverConfig solver;
};

Resolved resolve(const Options& o) {
  Resolved r;
  r.task.task = parse_task(o.task);
  r.task.gamma = o.gamma;
  if (r.task.task == Task::Ridge && !(o.gamma > 0.0)) throw ParameterError("gamma must be > 0");
  r.solver.alpha = o.alpha;
  r.solver.beta = o.beta;
  r.solver.rho = o.rho;
  r.solver.with_p(parse_norm(o.p));
  r.solver.s = parse_norm(o.s);
  r.solver.parallel = o.parallel;
  r.solver.seed = o.seed;
  r.solver.outer_max_iters = o.max_iters;
  r.solver.eps_abs = o.eps_abs;
  r.solver.eps_rel = o.eps_rel;
  r.solver.validate();
  if (!(o.c >= 0.0)) throw ParameterError("c must be >= 0");
  return r;
}

json config_echo(const std::string& command, const Options& o, const Resolved& r) {
  json j{{"command", command},
         {"task", to_string(r.task.task)},
         {"alpha", r.solver.alpha},
         {"beta", r.solver.beta},
         {"rho", r.solver.rho},
         {"p", to_string(r.solver.p)},
         {"q", to_string(r.solver.q)},
         {"s", to_string(r.solver.s)},
         {"c", o.c},
         {"k", o.k},
         {"parallel", r.solver.parallel},
         {"seed", r.solver.seed},
         {"rebuild_graph", o.rebuild_graph},
         {"max_iters", r.solver.outer_max_iters},
         {"eps_abs", r.solver.eps_abs},
         {"eps_rel", r.solver.eps_rel},
         {"data", o.data},
         {"graph", o.graph}};
  if (r.task.task == Task::Ridge) j["gamma"] = r.task.gamma;
  return j;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    io::atomic_write(path, content);
  }
}

Dataset load_data(const Options& o) {
  if (o.data.empty()) throw ParameterError("--data is required");
  return io::read_csv(o.data, o.target_last);
}

VariableGraph load_graph(const Options& o, const Dataset& data) {
  VariableGraph g = o.graph.empty() ? build_knn_graph(data, o.k) : io::read_graph(o.graph);
  if (g.vertex_count != data.row_count()) {
    throw DimensionError("graph has " + std::to_string(g.vertex_count) + " vertices but data has " +
                         std::to_string(data.row_count()) + " rows");
  }
  return g;
}

std::vector<double> parse_alphas(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    const std::string field(io::detail::trim(item));
    if (!io::detail::parse_number(field, v)) {
      throw ParameterError("--alphas entry is not a number: '" + field + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ParameterError("--alphas must list at least one value");
  return out;
}

Matrix gaussian_like(const Matrix& shape, double sigma, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, sigma);
  Matrix m(shape.rows(), shape.cols());
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = gauss(rng);
  return m;
}

json report_to_json(const BoundReport& r) {
  json terms = json::object();
  for (const auto& [name, value] : r.terms) terms[name] = value;
  return json{{"name", r.name},
              {"lhs", r.lhs},
              {"rhs", r.rhs},
              {"satisfied", r.satisfied},
              {"inputs",
               {{"beta", r.inputs.beta},
                {"c", r.inputs.c},
                {"norm_data", r.inputs.norm_data},
                {"norm_delta", r.inputs.norm_delta}}},
              {"terms", std::move(terms)}};
}

/// Solves on A and on A + delta and evaluates the task's two bounds.
std::vector<BoundReport> evaluate_bounds(const Resolved& r, const Dataset& data,
                                         const Matrix& delta, const VariableGraph& graph, double c,
                                         const std::optional<DualState>& warm = std::nullopt) {
  if (!(r.solver.beta > 0.0)) throw ParameterError("bounds need beta > 0");
  const Dataset evolved(data.values() + delta, data.targets());
  const EdgeIncidence q(graph, r.solver.alpha);
  const AnyProblem base = make_problem(r.task, data);
  const AnyProblem moved = make_problem(r.task, evolved);
  const SolveResult original = solve_dual(base, q, r.solver, warm);
  const SolveResult updated =
      delta.isZero(0.0) ? original : solve_dual(moved, q, r.solver, original.state);
  const Matrix& a = data.values();
  if (r.task.task == Task::ConvexClustering) {
    return {clustering_shift_check(a, delta, r.solver.beta, c, original.primal, updated.primal),
            clustering_dual_check(q, updated.state.lam, r.solver.s, evolved.values(), r.solver.beta)};
  }
  const Vector& y = *data.targets();
  return {ridge_shift_check(a, delta, y, r.task.gamma, r.solver.beta, c, original.primal,
                         updated.primal, r.solver.seed),
          ridge_dual_check(q, updated.state.lam, r.solver.s, a, delta, y, r.task.gamma,
                       r.solver.beta)};
}

int cmd_graph(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o);
  const Dataset data = load_data(o);
  const VariableGraph g = build_knn_graph(data, o.k);
  json j = io::graph_to_json(g);
  j["config"] = config_echo("graph", o, r);
  emit(o.out, io::dump(j), out);
  return kExitOk;
}

int cmd_solve(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o);
  const Dataset data = load_data(o);
  const VariableGraph g = load_graph(o, data);
  const EdgeIncidence q(g, r.solver.alpha);
  const AnyProblem problem = make_problem(r.task, data);
  const SolveResult res = solve_dual(problem, q, r.solver);
  const double dual = std::visit(
      [&](const auto& p) {
        return regularized_dual_objective(p, q, res.state.lam, r.solver.beta, r.solver.s);
      },
      problem);
  const double primal = std::visit(
      [&](const auto& p) { return primal_objective(p, q, res.primal, r.solver.p); }, problem);
  json j{{"X", io::matrix_to_json(res.primal)},
         {"lambda", io::matrix_to_json(res.state.lam)},
         {"dual_objective", dual},
         {"primal_objective", primal},
         {"iters", res.iterations},
         {"converged", res.converged()},
         {"status", to_string(res.status)},
         {"config", config_echo("solve", o, r)}};
  if (!o.trace.empty()) {
    std::ostringstream csv;
    res.trace.write_csv(csv);
    io::atomic_write(o.trace, csv.str());
  }
  emit(o.out, io::dump(j), out);
  return kExitOk;
}

int cmd_path(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o);
  const Dataset data = load_data(o);
  const VariableGraph g = load_graph(o, data);
  const std::vector<double> alphas = parse_alphas(o.alphas.empty() ? "0" : o.alphas);
  SweepOptions sw;
  sw.fuse_tolerance = o.eps_fuse;
  const ClusterPath path = sweep(r.task, data, g, alphas, r.solver, sw);

  std::ostringstream csv;
  csv.precision(17);
  csv << "alpha,vertex,label";
  for (Index j = 0; j < data.feature_count(); ++j) csv << ",x_" << j + 1;
  csv << '\n';
  json counts = json::array();
  for (const PathPoint& pt : path.points) {
    for (Index v = 0; v < pt.x.rows(); ++v) {
      csv << pt.alpha << ',' << v << ',' << pt.labels[static_cast<std::size_t>(v)];
      for (Index j = 0; j < pt.x.cols(); ++j) csv << ',' << pt.x(v, j);
      csv << '\n';
    }
    counts.push_back({{"alpha", pt.alpha},
                      {"clusters", cluster_count(pt.labels)},
                      {"iters", pt.iterations},
                      {"status", to_string(pt.status)}});
  }
  json summary{{"fuse_tolerance", path.fuse_tolerance},
               {"points", std::move(counts)},
               {"complete", path.complete()},
               {"config", config_echo("path", o, r)}};
  if (path.failed_alpha) {
    summary["failed_alpha"] = *path.failed_alpha;
    summary["failure"] = path.failure;
  }
  emit(o.out, csv.str(), out);
  if (!o.summary.empty()) io::atomic_write(o.summary, io::dump(summary));
  return path.complete() ? kExitOk : kExitNumeric;
}

int cmd_monitor(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o);
  const Dataset initial = load_data(o);
  const VariableGraph g = load_graph(o, initial);
  std::vector<Snapshot> stream;
  if (!o.snapshots.empty()) {
    stream = io::read_snapshots(o.snapshots, o.target_last);
  } else if (o.synthetic > 0) {
    std::mt19937_64 rng(o.seed);
    for (int t = 0; t < o.synthetic; ++t) {
      stream.push_back({static_cast<std::size_t>(t),
                        initial.values() + gaussian_like(initial.values(), o.sigma, rng),
                        initial.targets()});
    }
  } else {
    throw ParameterError("monitor needs --snapshots or --synthetic");
  }
  if (!o.bounds_out.empty() && !(r.solver.beta > 0.0)) {
    throw ParameterError("--bounds-out needs beta > 0");
  }

  SessionOptions session_opts;
  session_opts.rebuild_graph = o.rebuild_graph;
  session_opts.k = o.k;
  EvolutionSession session(r.task, initial, g, r.solver, o.c, session_opts);
  std::string log;
  std::string bounds_log;
  for (const Snapshot& snap : stream) {
    const Dataset before = session.accepted();
    const std::optional<DualState> warm = session.last_solve().state;
    const VariableGraph graph_before = session.graph();
    const EvolutionDecision d = session.observe(snap);
    json line{{"idx", d.index},
              {"delta_metric", d.delta_metric},
              {"threshold", d.threshold},
              {"action", to_string(d.action)},
              {"solve_iters", d.solve_iters},
              {"wall_ms", d.wall_ms}};
    if (d.solve_status) line["status"] = to_string(*d.solve_status);
    log += line.dump() + "\n";
    if (!o.bounds_out.empty()) {
      if (snap.values.rows() != before.row_count() || snap.values.cols() != before.feature_count())
        throw DimensionError("snapshot shape differs from the session dataset");
      const Matrix delta = snap.values - before.values();
      json reports = json::array();
      try {
        for (const auto& rep : evaluate_bounds(r, before, delta, graph_before, o.c, warm)) {
          reports.push_back(report_to_json(rep));
        }
      } catch (const std::invalid_argument& e) {
        throw SessionError(snap.index, e.what(), true);
      } catch (const std::exception& e) {
        throw SessionError(snap.index, e.what());
      }
      bounds_log += json{{"idx", d.index}, {"action", to_string(d.action)}, {"reports", reports}}
                        .dump() +
                    "\n";
    }
  }
  json footer{{"solves", session.solve_count()}, {"config", config_echo("monitor", o, r)}};
  log += json{{"summary", footer}}.dump() + "\n";
  emit(o.out, log, out);
  if (!o.bounds_out.empty()) io::atomic_write(o.bounds_out, bounds_log);
  return kExitOk;
}

int cmd_bound(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o);
  const Dataset data = load_data(o);
  const VariableGraph g = load_graph(o, data);
  Matrix delta;
  if (!o.delta.empty()) {
    delta = io::read_csv(o.delta).values();
    require_shape(delta, data.row_count(), data.feature_count(), "--delta");
  } else {
    std::mt19937_64 rng(o.seed);
    delta = gaussian_like(data.values(), o.sigma, rng);
  }
  json reports = json::array();
  for (const auto& rep : evaluate_bounds(r, data, delta, g, o.c)) {
    reports.push_back(report_to_json(rep));
  }
  json j{{"reports", std::move(reports)}, {"config", config_echo("bound", o, r)}};
  emit(o.out, io::dump(j), out);
  return kExitOk;
}

void add_common(CLI::App& app, Options& o) {
  app.add_option("--task", o.task, "cc or ridge");
  app.add_option("--alpha", o.alpha, "fusion strength");
  app.add_option("--beta", o.beta, "dual regularization weight");
  app.add_option("--gamma", o.gamma, "ridge penalty");
  app.add_option("--rho", o.rho, "ADMM penalty");
  app.add_option("--p", o.p, "edge norm: 1, 2 or inf");
  app.add_option("--s", o.s, "dual regularizer norm: 1, 2 or inf");
  app.add_option("--c", o.c, "resolve threshold");
  app.add_option("--k", o.k, "neighbours in the kNN graph");
  app.add_flag("--parallel", o.parallel, "column-parallel lambda update (p = 1)");
  app.add_option("--seed", o.seed, "seed for power iteration and synthetic perturbations");
  app.add_flag("--rebuild-graph", o.rebuild_graph, "rebuild the kNN graph on resolve");
  app.add_option("--out", o.out, "output file (stdout when omitted)");
  app.add_option("--data", o.data, "CSV data file");
  app.add_option("--graph", o.graph, "graph JSON (kNN graph from --data when omitted)");
  app.add_flag("--target-last", o.target_last, "last CSV column holds targets");
  app.add_option("--max-iters", o.max_iters, "ADMM iteration cap");
  app.add_option("--eps-abs", o.eps_abs, "absolute stopping tolerance");
  app.add_option("--eps-rel", o.eps_rel, "relative stopping tolerance");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"sparse convex optimization toolkit", "sco"};
  app.require_subcommand(1);
  auto* graph = app.add_subcommand("graph", "build a kNN graph");
  auto* solve = app.add_subcommand("solve", "solve one instance");
  auto* path = app.add_subcommand("path", "sweep alpha and report cluster memberships");
  auto* monitor = app.add_subcommand("monitor", "decide keep/resolve over a snapshot stream");
  auto* bound = app.add_subcommand("bound", "evaluate the perturbation bounds");
  for (auto* sub : {graph, solve, path, monitor, bound}) add_common(*sub, o);
  solve->add_option("--trace", o.trace, "convergence trace CSV");
  path->add_option("--alphas", o.alphas, "comma-separated increasing alphas");
  path->add_option("--eps-fuse", o.eps_fuse, "fusion tolerance");
  path->add_option("--summary", o.summary, "summary JSON file");
  monitor->add_option("--snapshots", o.snapshots, "CSV directory or JSONL file");
  monitor->add_option("--synthetic", o.synthetic, "number of Gaussian-perturbed snapshots");
  monitor->add_option("--sigma", o.sigma, "perturbation standard deviation");
  monitor->add_option("--bounds-out", o.bounds_out, "bound reports JSONL file");
  bound->add_option("--delta", o.delta, "perturbation CSV (Gaussian when omitted)");
  bound->add_option("--sigma", o.sigma, "perturbation standard deviation");

  auto fail = [&](int code, const std::string& kind, const std::string& message) {
    err << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
    return code;
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return fail(kExitConfig, "config", e.what());
  }

  try {
    if (*graph) return cmd_graph(o, out);
    if (*solve) return cmd_solve(o, out);
    if (*path) return cmd_path(o, out);
    if (*monitor) return cmd_monitor(o, out);
    return cmd_bound(o, out);
  } catch (const SessionError& e) {
    if (e.bad_input()) return fail(kExitConfig, "config", e.what());
    return fail(kExitNumeric, "numeric", e.what());
  } catch (const NumericError& e) {
    return fail(kExitNumeric, "numeric", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kExitConfig, "config", e.what());
  } catch (const std::exception& e) {
    return fail(kExitNumeric, "numeric", e.what());
  }
}

}  // namespace sco::cli
