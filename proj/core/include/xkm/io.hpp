#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "xkm/builder.hpp"
#include "xkm/eval.hpp"
#include "xkm/geometry.hpp"
#include "xkm/tree.hpp"

namespace xkm::io {

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);
/// C99 hex-float ("%a").
std::string format_hex(double v);
double parse_hex(std::string_view s);

// Point CSV: one point per row, comma-separated decimal doubles. A single
// header row is detected when the first row does not parse as numbers.

Dataset read_points_csv(std::istream& in);
Dataset read_points_csv(const std::filesystem::path& path);
void write_points_csv(std::ostream& out, const PointMatrix& points);
void write_points_csv(const std::filesystem::path& path, const PointMatrix& points);

CenterSet read_centers_csv(const std::filesystem::path& path);

// Tree file: JSON with nested node records.

inline constexpr int kTreeSchemaVersion = 1;

struct TreeFile {
  int schema_version = kTreeSchemaVersion;
  std::size_t k = 0;
  std::size_t d = 0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  ThresholdTree tree;

  friend bool operator==(const TreeFile&, const TreeFile&) = default;
};

std::string serialize_tree(const TreeFile& file);
/// Throws ParseError on malformed JSON or schema violations.
TreeFile parse_tree(std::string_view text);
void save_tree(const std::filesystem::path& path, const TreeFile& file);
TreeFile load_tree(const std::filesystem::path& path);

// Trace file: two comment lines, then one line per step:
//   <step> <dim> <theta-hex> <sigma> <node>:fail | <node>:split:<left>:<right> ...

struct TraceHeader {
  std::size_t k = 0;
  std::size_t d = 0;
  double delta = 0.0;
  std::uint64_t seed = 0;
};

void write_trace(std::ostream& out, const TraceHeader& header, const BuildTrace& trace);
/// Recovers draws and per-node outcomes (split children, not center sets).
BuildTrace read_trace(std::istream& in, TraceHeader* header = nullptr);

// Report CSV.

struct ReportRow {
  std::size_t k = 0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::size_t leaf_count = 0;
  std::size_t distinct_centers = 0;
  double tree_cost = 0.0;
  double ref_cost = 0.0;
  double ratio = 0.0;
  double runtime_ms = 0.0;
};

std::string_view report_header();
std::string format_report_row(const ReportRow& row);
/// Writes the header first when the file is new or empty; truncates unless `append`.
void write_report_rows(const std::filesystem::path& path, const std::vector<ReportRow>& rows,
                       bool append);
std::vector<ReportRow> read_report(const std::filesystem::path& path);

// Experiment statistics CSV (bench output).

struct StatsRow {
  std::string experiment;
  std::string metric;
  std::size_t k = 0;
  std::size_t d = 0;
  double delta = 0.0;
  ExperimentStats stats;
  double bound = 0.0;
  bool flag = false;
};

std::string_view stats_header();
void write_stats_rows(const std::filesystem::path& path, const std::vector<StatsRow>& rows);

}  // namespace xkm::io
