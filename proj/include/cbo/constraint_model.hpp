#pragma once

#include <cstdint>
#include <span>

#include "cbo/surrogate.hpp"

namespace cbo {

/// Minimum-throughput constraint p(speed(x) > threshold) >= 1 - tolerance.
/// Speeds are always modeled on the log scale.
struct ConstraintSpec {
  double threshold_wpm = 2000.0;
  double tolerance = 0.01;

  void validate() const;
  double log_threshold() const;
};

/// Phi((mean - log_threshold) / sd); a degenerate posterior returns 1 iff mean > log_threshold.
double prob_feasible(const PosteriorPrediction& log_speed, double log_threshold);
/// Inclusive: pof >= 1 - tolerance.
bool is_trusted(double pof, double tolerance);

/// GP over (x, ln speed) answering feasibility queries.
class ConstraintModel {
 public:
  ConstraintModel(ConstraintSpec spec, std::size_t dim, ModelPolicy policy = {});

  /// Appends ln(speed_wpm) and refits. Throws MeasurementError unless speed_wpm > 0.
  void add_speed_observation(UnitPoint x, double speed_wpm, std::uint64_t seed = 0);
  /// Append without refitting; call refit() before the next query.
  void append(UnitPoint x, double speed_wpm);
  void refit(std::uint64_t seed) { gp_.refit(seed); }

  PosteriorPrediction predict_log_speed(std::span<const double> x) const { return gp_.predict(x); }
  double prob_feasible(std::span<const double> x) const;
  bool is_trusted(std::span<const double> x) const;

  const ConstraintSpec& spec() const noexcept { return spec_; }
  const Surrogate& gp() const noexcept { return gp_; }

 private:
  ConstraintSpec spec_;
  Surrogate gp_;
};

}  // namespace cbo
