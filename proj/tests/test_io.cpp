#include <gtest/gtest.h>

#include <fstream>

#include "support.hpp"

namespace sco {
namespace {

TEST(Csv, HeaderCommentsAndTargets) {
  const Dataset d = io::parse_csv("# note\nx,y,t\n\n1,2,3\n4.5,-1e-2,+6\n", true);
  ASSERT_EQ(d.row_count(), 2);
  ASSERT_EQ(d.feature_count(), 2);
  EXPECT_EQ(d.values()(1, 0), 4.5);
  EXPECT_EQ(d.values()(1, 1), -0.01);
  ASSERT_TRUE(d.targets().has_value());
  EXPECT_EQ((*d.targets())(1), 6.0);
  const Dataset plain = io::parse_csv("1, 2\n3, 4\n");
  EXPECT_FALSE(plain.targets().has_value());
  EXPECT_EQ(plain.values()(1, 1), 4.0);
}

TEST(Csv, RejectsBadFields) {
  EXPECT_THROW(io::parse_csv("1,2\n3,nan\n"), io::InputError);
  EXPECT_THROW(io::parse_csv("1,inf\n"), io::InputError);
  EXPECT_THROW(io::parse_csv("1,2\n3,abc\n"), io::InputError);
  EXPECT_THROW(io::parse_csv("1,2\n3\n"), io::InputError);
  EXPECT_THROW(io::parse_csv("x,y\n"), io::InputError);
  EXPECT_THROW(io::parse_csv("1\n2\n", true), io::InputError);
  try {
    io::parse_csv("1,2\n3,x\n", false, "data.csv");
    FAIL();
  } catch (const io::InputError& e) {
    EXPECT_NE(std::string(e.what()).find("data.csv:2: field 2"), std::string::npos);
  }
}

TEST(Csv, DecimalCommaIsNotANumber) {
  EXPECT_THROW(io::parse_csv("1;5,2\n"), io::InputError);
}

TEST(Json, MatrixRoundTrip) {
  std::mt19937_64 rng(301);
  const Matrix m = testing::gaussian(rng, 3, 2);
  const io::json j = io::parse_json(io::matrix_to_json(m).dump(), "m");
  EXPECT_EQ(io::matrix_from_json(j), m);
  EXPECT_THROW(io::matrix_from_json(io::json::parse("[[1,2],[3]]")), io::InputError);
  EXPECT_THROW(io::matrix_from_json(io::json::parse("[]")), io::InputError);
  EXPECT_THROW(io::matrix_from_json(io::json::parse("[[1,\"a\"]]")), io::InputError);
  EXPECT_THROW(io::parse_json("{", "x"), io::InputError);
}

TEST(Json, GraphRoundTripAndValidation) {
  const VariableGraph g = testing::chain_graph(3, 0.5);
  EXPECT_EQ(io::graph_from_json(io::graph_to_json(g)), g);
  EXPECT_THROW(io::graph_from_json(io::json::parse(R"({"n":2,"edges":[[0,0,1]]})")),
               ValidationError);
  EXPECT_THROW(io::graph_from_json(io::json::parse(R"({"n":2,"edges":[[0,5,1]]})")),
               ValidationError);
  EXPECT_THROW(io::graph_from_json(io::json::parse(R"({"n":2,"edges":[[0,1,-1]]})")),
               ValidationError);
  EXPECT_THROW(io::graph_from_json(io::json::parse(R"({"edges":[]})")), io::InputError);
}

TEST(Files, AtomicWriteAndSnapshots) {
  const testing::ScratchDir dir("io");
  const auto file = dir.path() / "out.txt";
  io::atomic_write(file, "hello\n");
  EXPECT_EQ(io::read_text(file), "hello\n");
  EXPECT_FALSE(std::filesystem::exists(file.string() + ".tmp"));
  EXPECT_THROW(io::read_text(dir.path() / "missing"), io::InputError);

  const auto snaps = dir.path() / "snaps";
  std::filesystem::create_directory(snaps);
  io::atomic_write(snaps / "b.csv", "3,4\n");
  io::atomic_write(snaps / "a.csv", "1,2\n");
  io::atomic_write(snaps / "notes.txt", "ignored");
  const auto from_dir = io::read_snapshots(snaps);
  ASSERT_EQ(from_dir.size(), 2u);
  EXPECT_EQ(from_dir[0].values(0, 0), 1.0);
  EXPECT_EQ(from_dir[1].values(0, 1), 4.0);

  const auto jsonl = dir.path() / "s.jsonl";
  io::atomic_write(jsonl, "{\"values\": [[1, 2]]}\n\n{\"values\": [[3, 4]], \"targets\": [5]}\n");
  const auto from_lines = io::read_snapshots(jsonl);
  ASSERT_EQ(from_lines.size(), 2u);
  EXPECT_FALSE(from_lines[0].targets.has_value());
  EXPECT_EQ((*from_lines[1].targets)(0), 5.0);
  EXPECT_EQ(from_lines[1].index, 1u);

  io::atomic_write(jsonl, "{\"values\": [[1, 2]]}\n{\"targets\": [1]}\n");
  EXPECT_THROW(io::read_snapshots(jsonl), io::InputError);
}

}  // namespace
}  // namespace sco
