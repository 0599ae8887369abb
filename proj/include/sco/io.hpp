#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "sco/dataset.hpp"
#include "sco/evolution.hpp"
#include "sco/graph.hpp"

namespace sco::io {

using json = nlohmann::json;

/// Missing files, unreadable files and malformed content.
class InputError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Locale-free decimal parse. Only finite values are accepted.
inline bool parse_number(std::string_view field, double& out) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

}  // namespace detail

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes through a sibling temp file and renames it into place.
inline void atomic_write(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw InputError("cannot move output into place at " + path.string());
  }
}

/// "-" or an empty path means stdout.
inline void write_output(const std::string& path, std::string_view content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
  } else {
    atomic_write(path, content);
  }
}

/// CSV text to a dataset. Lines starting with '#' and blank lines are skipped; a first row
/// with no numeric field is a header. With target_last the final column becomes targets.
inline Dataset parse_csv(std::string_view text, bool target_last = false,
                         const std::string& origin = "csv") {
  std::vector<std::vector<double>> rows;
  bool header_checked = false;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    const std::string_view raw =
        text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    const std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = detail::split(line, ',');
    std::vector<double> values(fields.size());
    std::vector<bool> parsed(fields.size());
    for (std::size_t f = 0; f < fields.size(); ++f) {
      parsed[f] = detail::parse_number(fields[f], values[f]);
    }
    // from_chars accepts "nan" and "inf", so those rows never pass for a header.
    if (!header_checked) {
      header_checked = true;
      if (std::none_of(parsed.begin(), parsed.end(), [](bool b) { return b; })) continue;
    }
    for (std::size_t f = 0; f < fields.size(); ++f) {
      if (parsed[f] && std::isfinite(values[f])) continue;
      throw InputError(origin + ":" + std::to_string(line_no) + ": field " +
                       std::to_string(f + 1) + " is not a finite number: '" +
                       std::string(fields[f]) + "'");
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw InputError(origin + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(rows.front().size()) + " fields, found " +
                       std::to_string(values.size()));
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw InputError(origin + ": no data rows");
  const Index cols = static_cast<Index>(rows.front().size());
  const Index feature_cols = target_last ? cols - 1 : cols;
  if (feature_cols < 1) throw InputError(origin + ": need at least one feature column");
  Matrix values(static_cast<Index>(rows.size()), feature_cols);
  Vector targets(static_cast<Index>(rows.size()));
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < feature_cols; ++j) values(i, j) = rows[i][j];
    if (target_last) targets(i) = rows[i][feature_cols];
  }
  if (target_last) return Dataset(std::move(values), std::move(targets));
  return Dataset(std::move(values));
}

inline Dataset read_csv(const std::filesystem::path& path, bool target_last = false) {
  return parse_csv(read_text(path), target_last, path.string());
}

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline Matrix matrix_from_json(const json& j, const std::string& what = "matrix") {
  if (!j.is_array() || j.empty()) throw InputError(what + " must be a nonempty array of rows");
  const auto cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0) throw InputError(what + " rows must be nonempty arrays");
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw InputError(what + " row " + std::to_string(i) + " has the wrong length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[i][c].is_number()) throw InputError(what + " entries must be numbers");
      m(static_cast<Index>(i), static_cast<Index>(c)) = j[i][c].get<double>();
    }
  }
  if (!all_finite(m)) throw InputError(what + " contains non-finite values");
  return m;
}

inline Vector vector_from_json(const json& j, const std::string& what = "vector") {
  if (!j.is_array()) throw InputError(what + " must be an array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InputError(what + " entries must be numbers");
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  if (!all_finite(v)) throw InputError(what + " contains non-finite values");
  return v;
}

inline json graph_to_json(const VariableGraph& g) {
  json edges = json::array();
  for (const Edge& e : g.edges) edges.push_back(json::array({e.i, e.j, e.weight}));
  return json{{"n", g.vertex_count}, {"edges", std::move(edges)}};
}

inline std::string describe(const std::vector<GraphViolation>& violations) {
  std::string msg = "invalid graph:";
  for (const auto& v : violations) {
    msg += " [edge " + std::to_string(v.edge_index) + ": " + v.reason + "]";
  }
  return msg;
}

/// {"n": vertices, "edges": [[i, j, w], ...]}, validated on read.
inline VariableGraph graph_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("edges")) {
    throw InputError("graph JSON needs \"n\" and \"edges\"");
  }
  if (!j["n"].is_number_integer()) throw InputError("graph \"n\" must be an integer");
  VariableGraph g;
  g.vertex_count = j["n"].get<Index>();
  if (!j["edges"].is_array()) throw InputError("graph \"edges\" must be an array");
  for (const auto& e : j["edges"]) {
    if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() ||
        !e[1].is_number_integer() || !e[2].is_number()) {
      throw InputError("each edge must be [i, j, weight]");
    }
    g.edges.push_back({e[0].get<Index>(), e[1].get<Index>(), e[2].get<double>()});
  }
  if (auto violations = validate_graph(g); !violations.empty()) {
    throw ValidationError(describe(violations));
  }
  return g;
}

inline json parse_json(std::string_view text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(origin + ": " + e.what());
  }
}

inline VariableGraph read_graph(const std::filesystem::path& path) {
  return graph_from_json(parse_json(read_text(path), path.string()));
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// A directory of CSV files (lexicographic order) or a JSONL file with one
/// {"values": [[...]], "targets": [...]} object per line.
inline std::vector<Snapshot> read_snapshots(const std::filesystem::path& path,
                                            bool target_last = false) {
  std::vector<Snapshot> out;
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".csv") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      Dataset d = read_csv(f, target_last);
      out.push_back({out.size(), d.values(), d.targets()});
    }
  } else {
    const std::string text = read_text(path);
    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
      ++line_no;
      if (detail::trim(line).empty()) continue;
      const std::string origin = path.string() + ":" + std::to_string(line_no);
      const json j = parse_json(line, origin);
      if (!j.is_object() || !j.contains("values")) {
        throw InputError(origin + ": snapshot needs \"values\"");
      }
      Snapshot s;
      s.index = out.size();
      s.values = matrix_from_json(j["values"], origin + " values");
      if (j.contains("targets") && !j["targets"].is_null()) {
        s.targets = vector_from_json(j["targets"], origin + " targets");
      }
      out.push_back(std::move(s));
    }
  }
  if (out.empty()) throw InputError(path.string() + ": no snapshots found");
  return out;
}

}  // namespace sco::io
