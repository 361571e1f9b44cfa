#include "cbo/baselines.hpp"

#include <random>

#include "cbo/errors.hpp"

namespace cbo {
namespace {

BaselineResult evaluate_all(const std::vector<RawPoint>& points, Evaluator& evaluator,
                            const ConstraintSpec& constraint, std::uint64_t seed, const BaselineCallback& callback) {
  BaselineResult out;
  out.history.settings.constraint = constraint;
  out.history.settings.budget = int(points.size());
  out.history.settings.seed = seed;
  for (std::size_t i = 0; i < points.size(); ++i) {
    Observation obs;
    obs.x = points[i];
    obs.task = TaskKind::Both;
    obs.iteration_index = int(i);
    try {
      const auto r = evaluator.evaluate({points[i], TaskKind::Both, mix_seed(seed, i, 2)});
      obs.objective_value = r.objective;
      obs.constraint_value_raw = r.speed_wpm;
      obs.duration_seconds = r.wall_seconds;
    } catch (const EvaluationError& e) {
      obs.failed = true;
      obs.failure = e.what();
    }
    const bool feasible = !obs.failed && obs.objective_value && obs.constraint_value_raw &&
                          *obs.constraint_value_raw > constraint.threshold_wpm;
    if (feasible && (!out.best_objective || *obs.objective_value > *out.best_objective)) {
      out.best = obs.x;
      out.best_objective = obs.objective_value;
      out.best_speed_wpm = obs.constraint_value_raw;
    }
    out.history.observations.push_back(std::move(obs));
    if (callback) callback(out.history.observations.back(), out);
  }
  return out;
}

}  // namespace

BaselineResult grid_search(const SearchSpace& space, Evaluator& evaluator, const ConstraintSpec& constraint,
                           int values_per_dim, std::uint64_t seed, const BaselineCallback& callback) {
  constraint.validate();
  return evaluate_all(space.grid_values(values_per_dim), evaluator, constraint, seed, callback);
}

BaselineResult random_search(const SearchSpace& space, Evaluator& evaluator, const ConstraintSpec& constraint,
                             int budget, std::uint64_t seed, const BaselineCallback& callback) {
  constraint.validate();
  if (budget < 1) throw ParameterError("random search budget must be at least 1");
  std::mt19937_64 rng(mix_seed(seed, 0x7a));
  std::vector<RawPoint> points;
  points.reserve(std::size_t(budget));
  for (int i = 0; i < budget; ++i) points.push_back(space.sample_uniform(rng));
  return evaluate_all(points, evaluator, constraint, seed, callback);
}

}  // namespace cbo
