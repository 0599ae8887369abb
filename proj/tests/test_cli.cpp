#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "cli.hpp"
#include "support.hpp"

namespace sco {
namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  CliTest() : dir_("cli") {}

  std::string write(const std::string& name, const std::string& content) {
    const auto p = dir_ / name;
    io::atomic_write(p, content);
    return p.string();
  }

  std::string random_csv(const std::string& name, std::uint64_t seed, Index n, Index d) {
    std::mt19937_64 rng(seed);
    const Matrix a = testing::gaussian(rng, n, d);
    std::ostringstream csv;
    csv.precision(17);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < d; ++j) csv << (j ? "," : "") << a(i, j);
      csv << '\n';
    }
    return write(name, csv.str());
  }

  testing::ScratchDir dir_;
};

TEST_F(CliTest, GraphMatchesTheBuilderExample) {
  const auto data = write("three.csv", "x\n0\n1\n3\n");
  const CliRun r = run({"graph", "--data", data, "--k", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const io::json j = io::json::parse(r.out);
  const VariableGraph g = io::graph_from_json(j);
  EXPECT_EQ(g.vertex_count, 3);
  ASSERT_EQ(g.edges.size(), 2u);
  EXPECT_EQ(g.edges[0], (Edge{0, 1, 1.0}));
  EXPECT_EQ(g.edges[1], (Edge{1, 2, 0.5}));
  EXPECT_EQ(j["config"]["command"], "graph");
  EXPECT_EQ(j["config"]["k"], 1);
}

TEST_F(CliTest, SolveAtZeroAlphaReturnsTheData) {
  const auto data = random_csv("a.csv", 401, 6, 2);
  const CliRun r = run({"solve", "--data", data, "--k", "2", "--alpha", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const io::json j = io::json::parse(r.out);
  EXPECT_EQ(io::matrix_from_json(j["X"]), io::read_csv(data).values());
  EXPECT_TRUE(j["converged"].get<bool>());
  for (const char* key : {"lambda", "dual_objective", "primal_objective", "iters", "config"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST_F(CliTest, SolveIsByteIdenticalAcrossRuns) {
  const auto data = random_csv("a.csv", 409, 8, 2);
  const std::vector<std::string> args{"solve", "--data", data, "--k", "3", "--seed", "7"};
  const CliRun first = run(args);
  const CliRun second = run(args);
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_EQ(first.out, second.out);
}

TEST_F(CliTest, ParallelMatchesSerial) {
  const auto data = random_csv("a.csv", 419, 8, 4);
  const CliRun serial = run({"solve", "--data", data, "--k", "3", "--p", "1", "--eps-abs", "1e-10",
                          "--eps-rel", "1e-9", "--max-iters", "20000"});
  const CliRun parallel = run({"solve", "--data", data, "--k", "3", "--p", "1", "--eps-abs",
                            "1e-10", "--eps-rel", "1e-9", "--max-iters", "20000", "--parallel"});
  ASSERT_EQ(serial.code, 0) << serial.err;
  ASSERT_EQ(parallel.code, 0) << parallel.err;
  const Matrix xs = io::matrix_from_json(io::json::parse(serial.out)["X"]);
  const Matrix xp = io::matrix_from_json(io::json::parse(parallel.out)["X"]);
  EXPECT_LE((xs - xp).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_EQ(io::json::parse(parallel.out)["config"]["q"], "inf");
}

TEST_F(CliTest, SolveWritesTrace) {
  const auto data = random_csv("a.csv", 421, 5, 2);
  const auto trace = (dir_ / "trace.csv").string();
  const CliRun r = run({"solve", "--data", data, "--k", "2", "--trace", trace});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string text = io::read_text(trace);
  EXPECT_EQ(text.rfind("iter,", 0), 0u);
}

std::vector<io::json> lines(const std::string& text) {
  std::vector<io::json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(io::json::parse(line));
  return out;
}

TEST_F(CliTest, MonitorIdenticalStream) {
  const auto data = random_csv("a.csv", 431, 6, 2);
  std::filesystem::create_directory(dir_ / "snaps");
  for (const char* name : {"snaps/1.csv", "snaps/2.csv", "snaps/3.csv"}) {
    std::filesystem::copy_file(data, dir_ / name);
  }
  const CliRun r = run({"monitor", "--data", data, "--k", "2", "--snapshots",
                     (dir_ / "snaps").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto log = lines(r.out);
  ASSERT_EQ(log.size(), 4u);
  for (int t = 0; t < 3; ++t) {
    EXPECT_EQ(log[t]["action"], "keep");
    EXPECT_EQ(log[t]["delta_metric"].get<double>(), 0.0);
  }
  EXPECT_EQ(log[3]["summary"]["solves"], 1);
}

TEST_F(CliTest, MonitorZeroThresholdAndSyntheticBounds) {
  const auto data = random_csv("a.csv", 433, 6, 2);
  const auto bounds = (dir_ / "bounds.jsonl").string();
  const CliRun r = run({"monitor", "--data", data, "--k", "2", "--c", "0", "--synthetic", "4",
                     "--sigma", "0.1", "--seed", "3", "--bounds-out", bounds});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto log = lines(r.out);
  ASSERT_EQ(log.size(), 5u);
  for (int t = 0; t < 4; ++t) {
    EXPECT_EQ(log[t]["action"], "resolve");
    EXPECT_GT(log[t]["delta_metric"].get<double>(), 0.0);
    EXPECT_TRUE(log[t].contains("status"));
  }
  EXPECT_EQ(log[4]["summary"]["solves"], 5);
  const auto reports = lines(io::read_text(bounds));
  ASSERT_EQ(reports.size(), 4u);
  EXPECT_EQ(reports[0]["reports"][0]["name"], "clustering_shift");
  EXPECT_EQ(reports[0]["reports"][1]["name"], "clustering_dual");
}

TEST_F(CliTest, BoundWithZeroDelta) {
  const auto data = random_csv("a.csv", 439, 5, 2);
  const auto delta = write("zero.csv", "0,0\n0,0\n0,0\n0,0\n0,0\n");
  const CliRun r = run({"bound", "--data", data, "--k", "2", "--delta", delta, "--c", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  const io::json j = io::json::parse(r.out);
  const io::json& t3 = j["reports"][0];
  EXPECT_EQ(t3["name"], "clustering_shift");
  EXPECT_DOUBLE_EQ(t3["rhs"].get<double>(), 5.0);
  EXPECT_EQ(t3["lhs"].get<double>(), 0.0);
  EXPECT_TRUE(t3["satisfied"].get<bool>());
}

TEST_F(CliTest, BoundRidgeNeedsTargets) {
  const auto data = write("r.csv", "1,2,1\n2,1,0\n3,3,1\n4,0,0\n");
  const CliRun ok = run({"bound", "--task", "ridge", "--data", data, "--target-last", "--k", "2"});
  ASSERT_EQ(ok.code, 0) << ok.err;
  const io::json j = io::json::parse(ok.out);
  EXPECT_EQ(j["reports"][0]["name"], "ridge_shift");
  EXPECT_EQ(j["reports"][1]["name"], "ridge_dual");
  EXPECT_EQ(j["config"]["gamma"], 5.0);
  const CliRun missing = run({"bound", "--task", "ridge", "--data", data, "--k", "2"});
  EXPECT_EQ(missing.code, 2);
}

TEST_F(CliTest, PathAtZeroAlphaIsSingletons) {
  const auto data = random_csv("a.csv", 443, 5, 2);
  const auto summary = (dir_ / "summary.json").string();
  const CliRun r = run({"path", "--data", data, "--k", "2", "--alphas", "0", "--summary", summary});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "alpha,vertex,label,x_1,x_2");
  std::set<std::string> labels;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::stringstream fields(line);
    std::string alpha, vertex, label;
    std::getline(fields, alpha, ',');
    std::getline(fields, vertex, ',');
    std::getline(fields, label, ',');
    EXPECT_EQ(vertex, label);
    labels.insert(label);
  }
  EXPECT_EQ(rows, 5);
  EXPECT_EQ(labels.size(), 5u);
  const io::json s = io::json::parse(io::read_text(summary));
  EXPECT_EQ(s["points"][0]["clusters"], 5);
  EXPECT_TRUE(s["complete"].get<bool>());
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  const auto data = random_csv("a.csv", 449, 3, 1);
  const auto nan_csv = write("nan.csv", "1\nnan\n2\n");
  const std::vector<std::vector<std::string>> cases{
      {"solve", "--data", data, "--k", "5"},
      {"solve", "--data", nan_csv, "--k", "1"},
      {"solve", "--data", (dir_ / "missing.csv").string()},
      {"solve", "--data", data, "--k", "1", "--p", "3"},
      {"solve", "--data", data, "--k", "1", "--rho", "0"},
      {"solve", "--data", data, "--task", "lasso"},
      {"solve", "--no-such-flag"},
      {"path", "--data", data, "--k", "1", "--alphas", "2,1"},
      {"monitor", "--data", data, "--k", "1"},
      {},
  };
  for (const auto& args : cases) {
    const CliRun r = run(args);
    EXPECT_EQ(r.code, 2) << (args.empty() ? "" : args.back()) << ": " << r.err;
    const io::json e = io::json::parse(r.err);
    EXPECT_EQ(e["error"], "config");
    EXPECT_EQ(e["exit_code"], 2);
    EXPECT_FALSE(e["message"].get<std::string>().empty());
  }
}

TEST_F(CliTest, NumericFailureExitsThree) {
  const auto data = write("big.csv", "1,0\n0,1\n0,0\n");
  const CliRun r = run({"path", "--data", data, "--k", "1", "--beta", "0", "--alphas", "0,1e300"});
  EXPECT_EQ(r.code, 3);
}

TEST_F(CliTest, OutputsRoundTrip) {
  const auto data = random_csv("a.csv", 457, 6, 2);
  const auto graph_file = (dir_ / "g.json").string();
  ASSERT_EQ(run({"graph", "--data", data, "--k", "2", "--out", graph_file}).code, 0);
  const VariableGraph g = io::read_graph(graph_file);
  const CliRun solved = run({"solve", "--data", data, "--graph", graph_file});
  ASSERT_EQ(solved.code, 0) << solved.err;
  const io::json j = io::json::parse(solved.out);
  const Matrix x = io::matrix_from_json(j["X"]);
  const Matrix lam = io::matrix_from_json(j["lambda"]);
  EXPECT_EQ(x.rows(), 6);
  EXPECT_EQ(lam.rows(), static_cast<Index>(g.edges.size()));
  EXPECT_EQ(j["config"]["graph"], graph_file);
}

}  // namespace
}  // namespace sco
