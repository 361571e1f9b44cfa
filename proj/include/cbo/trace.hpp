#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbo/acquisition.hpp"
#include "cbo/search_space.hpp"

namespace cbo {

/// One evaluation as written to a trace file.
struct TraceRow {
  int iteration = 0;
  TaskKind task = TaskKind::Both;
  RawPoint theta;
  std::optional<double> objective;
  std::optional<double> speed_wpm;
  double wall_seconds = 0.0;
  double cumulative_decode_seconds = 0.0;
  double bo_overhead_seconds = 0.0;
  std::optional<double> incumbent_objective;  // posterior mean (BO) or best measured (baselines)
  std::optional<double> incumbent_observed;   // raw measurement behind the incumbent
  std::optional<double> incumbent_pof;
  std::optional<RawPoint> incumbent_theta;
  bool incumbent_trusted = false;
  bool failed = false;
};

/// Run-level metadata stored on the first line of a trace file.
struct TraceMeta {
  std::string method;  // bo-s, bo-d, grid, random
  double threshold_wpm = 0.0;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  std::vector<ParamSpec> params;

  nlohmann::ordered_json to_json() const;
  static TraceMeta from_json(const nlohmann::json& j);
};

struct Trace {
  TraceMeta meta;
  std::vector<TraceRow> rows;
};

/// Numbers as text with 6 significant digits.
std::string format_number(double v);

std::string trace_header(const TraceMeta& meta);
std::string format_trace_row(const TraceRow& row);

/// Appends rows to a trace file, flushing after each so a crash leaves a valid prefix.
class TraceWriter {
 public:
  TraceWriter(const std::string& path, const TraceMeta& meta);
  void append(const TraceRow& row);

 private:
  std::ofstream out_;
  std::size_t dim_;
};

Trace read_trace(const std::string& path);

}  // namespace cbo
