#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cbo/acquisition.hpp"
#include "cbo/search_space.hpp"

namespace cbo {

struct EvaluationRequest {
  RawPoint x;  // (d, s, n) in raw units
  TaskKind task = TaskKind::Both;
  std::uint64_t seed = 0;  // simulator noise only
};

struct EvaluationResult {
  std::optional<double> objective;  // score in [0, 100]
  std::optional<double> speed_wpm;
  long words_translated = 0;
  double wall_seconds = 0.0;
};

/// Anything that can decode a configuration and report score and/or speed.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual EvaluationResult evaluate(const EvaluationRequest& request) = 0;
  /// Words in the speed subset divided by words in the full set.
  virtual double subset_fraction() const = 0;
};

/// Synthetic decoder: log-linear speed with log-normal noise, saturating score with
/// Gaussian noise. Defaults reproduce the fast/slow anchors (0,1,1) -> 105.7k wpm and
/// (5,100,100) -> 854.23 wpm.
struct SimulatorConfig {
  double W0 = 105700.0;
  double alpha = 0.5;   // exponent on (1 + d)
  double beta = 0.55;   // exponent on s
  double gamma = 0.0;   // exponent on n; 0 means "solve from the slow anchor"
  double sigma_log = 0.05;
  double B_star = 37.0;
  double A_d = 3.0, A_s = 5.0, A_n = 2.0;
  double tau_d = 1.5, tau_s = 1.0, tau_n = 1.0;
  double sigma_B = 0.05;
  long full_set_words = 25000;
  long subset_words = 1000;
  /// Multiplies every reported duration; < 1 gives an accelerated clock.
  double time_scale = 1.0;

  static constexpr double kSlowAnchorWpm = 854.23;

  /// gamma such that the slow setting (5,100,100) runs at exactly kSlowAnchorWpm.
  static double anchored_gamma(double W0, double alpha, double beta);
  /// Defaults with gamma resolved.
  static SimulatorConfig calibrated();

  void validate() const;
  double resolved_gamma() const { return gamma > 0.0 ? gamma : anchored_gamma(W0, alpha, beta); }
  double noiseless_speed(const RawPoint& x) const;
  double noiseless_score(const RawPoint& x) const;
};

/// Pure function of (config, request); ConstraintOnly decodes the subset, everything else the full set.
EvaluationResult simulate(const SimulatorConfig& cfg, const EvaluationRequest& request);

class SimulatedDecoder : public Evaluator {
 public:
  explicit SimulatedDecoder(SimulatorConfig cfg);
  EvaluationResult evaluate(const EvaluationRequest& request) override { return simulate(cfg_, request); }
  double subset_fraction() const override { return double(cfg_.subset_words) / double(cfg_.full_set_words); }
  const SimulatorConfig& config() const noexcept { return cfg_; }

 private:
  SimulatorConfig cfg_;
};

/// Runs a decoder command. Placeholders: {d} {s} {n} {sentences}.
struct ExternalCommandSpec {
  std::string command_template;
  std::string full_set_path;
  std::string subset_path;
  long full_set_words = 0;
  long subset_words = 0;
  double timeout_seconds = 3600.0;

  void validate() const;
};

/// Substitutes the placeholders (sentence path shell-quoted) for the requested task.
std::string render_command(const ExternalCommandSpec& spec, const EvaluationRequest& request);

/// Throughput of a decode: 60 * words / seconds.
double words_per_minute(long words, double seconds);

/// Parses the last "SCORE <float>" line; nullopt if there is none.
std::optional<double> parse_score(const std::string& output);

/// Throws EvaluationError on nonzero exit, timeout, or a missing score when one was requested.
EvaluationResult run_external(const ExternalCommandSpec& spec, const EvaluationRequest& request);

class ExternalDecoder : public Evaluator {
 public:
  explicit ExternalDecoder(ExternalCommandSpec spec);
  EvaluationResult evaluate(const EvaluationRequest& request) override { return run_external(spec_, request); }
  double subset_fraction() const override { return double(spec_.subset_words) / double(spec_.full_set_words); }

 private:
  ExternalCommandSpec spec_;
};

/// ConstraintOnly evaluation; returns only the speed.
double measure_speed_subset(Evaluator& evaluator, const RawPoint& x, std::uint64_t seed = 0);

}  // namespace cbo
