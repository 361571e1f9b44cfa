#include "cbo/constraint_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cbo/errors.hpp"
#include "cbo/normal.hpp"

namespace cbo {

void ConstraintSpec::validate() const {
  if (!(threshold_wpm > 0.0) || !std::isfinite(threshold_wpm))
    throw ParameterError("constraint threshold must be a positive speed");
  if (!(tolerance > 0.0 && tolerance < 1.0)) throw ParameterError("constraint tolerance must lie in (0, 1)");
}

double ConstraintSpec::log_threshold() const { return std::log(threshold_wpm); }

double prob_feasible(const PosteriorPrediction& log_speed, double log_threshold) {
  const double sd = std::sqrt(std::max(0.0, log_speed.variance));
  if (sd <= 0.0) return log_speed.mean > log_threshold ? 1.0 : 0.0;
  return std::clamp(normal_cdf((log_speed.mean - log_threshold) / sd), 0.0, 1.0);
}

bool is_trusted(double pof, double tolerance) { return pof >= 1.0 - tolerance; }

ConstraintModel::ConstraintModel(ConstraintSpec spec, std::size_t dim, ModelPolicy policy)
    : spec_(spec), gp_(dim, std::move(policy)) {
  spec_.validate();
}

void ConstraintModel::append(UnitPoint x, double speed_wpm) {
  if (!(speed_wpm > 0.0) || !std::isfinite(speed_wpm))
    throw MeasurementError("speed measurement must be positive and finite, got " + std::to_string(speed_wpm));
  gp_.add(std::move(x), std::log(speed_wpm));
}

void ConstraintModel::add_speed_observation(UnitPoint x, double speed_wpm, std::uint64_t seed) {
  append(std::move(x), speed_wpm);
  gp_.refit(seed);
}

double ConstraintModel::prob_feasible(std::span<const double> x) const {
  return cbo::prob_feasible(gp_.predict(x), spec_.log_threshold());
}

bool ConstraintModel::is_trusted(std::span<const double> x) const {
  return cbo::is_trusted(prob_feasible(x), spec_.tolerance);
}

}  // namespace cbo
