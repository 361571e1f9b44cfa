#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbo/evaluator.hpp"
#include "cbo/optimizer.hpp"
#include "cbo/search_space.hpp"
#include "cbo/trace.hpp"

namespace cbo {

enum class Method { BoStandard, BoDecoupled, Grid, Random };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct ExperimentConfig {
  Method method = Method::BoStandard;
  std::vector<ParamSpec> params = SearchSpace::decoder_default().params();
  ConstraintSpec constraint{2000.0, 0.01};
  int budget = 125;  // objective decodes (BO-S, random) or iterations (BO-D)
  int n_init = 3;
  int values_per_dim = 5;
  int max_consecutive_constraint = 10;
  std::uint64_t seed = 0;
  std::optional<SimulatorConfig> simulator = SimulatorConfig::calibrated();
  std::optional<ExternalCommandSpec> external;
  std::filesystem::path output_dir = "cbo-run";
  bool measure_overhead = true;
  int final_measurements = 3;

  /// Defaults for the method (delta 0.01 / budget 125 except BO-D: 0.05 / 250), then `j` on top.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
  /// Throws ConfigError naming the offending field.
  void validate() const;
  std::unique_ptr<Evaluator> make_evaluator() const;
};

struct ExperimentOutcome {
  nlohmann::ordered_json summary;
  std::filesystem::path trace_path;
  std::filesystem::path summary_path;
  std::filesystem::path plot_path;
};

/// Runs the configured method, writing trace.csv, summary.json and best_so_far.csv.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

struct SpeedStats {
  RawPoint theta;
  std::vector<double> speeds;
  double mean = 0.0, std = 0.0;          // raw wpm
  double log_mean = 0.0, log_std = 0.0;  // ln wpm
  std::vector<double> bin_edges;         // histogram of raw speeds
  std::vector<int> bin_counts;
};

struct NoiseStudyReport {
  SpeedStats slow;
  SpeedStats fast;

  std::string table() const;
  std::string histogram_csv() const;
  nlohmann::ordered_json to_json() const;
};

/// Decodes the full set `repeats` times at each setting. Std uses the n-1 estimator.
NoiseStudyReport noise_study(Evaluator& evaluator, const RawPoint& slow, const RawPoint& fast, int repeats,
                             std::uint64_t seed = 0, int bins = 20);

struct MethodSummary {
  std::string label;  // method name plus trace path
  std::string method;
  std::optional<double> best_feasible_objective;
  std::optional<double> decode_seconds_to_reach;  // within epsilon of the overall best
  std::optional<double> total_seconds_to_reach;   // decode + BO overhead
  std::optional<int> evaluations_to_reach;
  std::optional<RawPoint> final_theta;
  double total_decode_seconds = 0.0;
  double total_overhead_seconds = 0.0;
};

struct ComparisonReport {
  double overall_best = 0.0;
  double epsilon = 0.0;
  std::vector<MethodSummary> rows;  // fastest to reach first
  std::string plot_csv;             // method,cumulative_decode_seconds,cumulative_total_seconds,best_feasible_objective

  std::string table() const;
};

/// Feasibility: measured speed > threshold for baselines; PoF >= 1 - delta under a
/// constraint model refitted on the whole trace for BO runs.
ComparisonReport compare_report(const std::vector<Trace>& traces, const std::vector<std::string>& labels,
                                double epsilon = 0.1);

}  // namespace cbo
