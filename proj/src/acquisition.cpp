#include "cbo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "cbo/errors.hpp"
#include "cbo/normal.hpp"

namespace cbo {

std::string_view to_string(TaskKind task) {
  switch (task) {
    case TaskKind::Both:
      return "both";
    case TaskKind::ObjectiveOnly:
      return "objective";
    case TaskKind::ConstraintOnly:
      return "constraint";
  }
  return "both";
}

TaskKind task_from_string(std::string_view name) {
  if (name == "both") return TaskKind::Both;
  if (name == "objective") return TaskKind::ObjectiveOnly;
  if (name == "constraint") return TaskKind::ConstraintOnly;
  throw ParameterError("unknown task kind '" + std::string(name) + "'");
}

double expected_improvement(const PosteriorPrediction& objective, double incumbent) {
  const double sigma = std::sqrt(std::max(0.0, objective.variance));
  const double gap = objective.mean - incumbent;
  if (sigma <= 0.0) return std::max(gap, 0.0);
  const double z = gap / sigma;
  return std::max(0.0, sigma * (z * normal_cdf(z) + normal_pdf(z)));
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log1p(-p);
}

double constrained_acquisition(const PosteriorPrediction& objective, double pof, std::optional<double> incumbent) {
  if (!incumbent) return pof;
  return expected_improvement(objective, *incumbent) * pof;
}

double constrained_acquisition(std::span<const double> x, const Surrogate& objective, const ConstraintModel& constraint,
                               std::optional<double> incumbent) {
  const double pof = constraint.prob_feasible(x);
  if (!incumbent || pof <= 0.0) return incumbent ? 0.0 : pof;
  return constrained_acquisition(objective.predict(x), pof, incumbent);
}

DecoupledUtilities decoupled_utilities(const PosteriorPrediction& objective, double pof,
                                       std::optional<double> incumbent) {
  const double ei = incumbent ? expected_improvement(objective, *incumbent) : 1.0;
  return {ei * pof, ei * binary_entropy(pof)};
}

DecoupledUtilities decoupled_utilities(std::span<const double> x, const Surrogate& objective,
                                       const ConstraintModel& constraint, std::optional<double> incumbent) {
  return decoupled_utilities(objective.predict(x), constraint.prob_feasible(x), incumbent);
}

Suggestion select_task(const ScoredPoint& best_objective, const ScoredPoint& best_constraint, double cost_objective_s,
                       double cost_constraint_s) {
  if (!(cost_objective_s > 0.0) || !(cost_constraint_s > 0.0)) throw ParameterError("task costs must be positive");
  // Compare U_obj / c_obj >= U_con / c_con without dividing, so common scaling of costs cannot flip it.
  if (best_objective.value * cost_constraint_s >= best_constraint.value * cost_objective_s)
    return {best_objective.x, TaskKind::ObjectiveOnly, best_objective.value, cost_objective_s};
  return {best_constraint.x, TaskKind::ConstraintOnly, best_constraint.value, cost_constraint_s};
}

namespace {

bool better(const ScoredPoint& a, const ScoredPoint& b) {
  if (a.value != b.value) return a.value > b.value;
  return a.x < b.x;
}

ScoredPoint compass_search(std::size_t dim, const ScoreFunction& score, ScoredPoint start, const AcquisitionSearch& s) {
  double step = s.initial_step;
  int evaluations = 0;
  while (step >= s.min_step && evaluations < s.max_local_evaluations) {
    bool improved = false;
    for (std::size_t d = 0; d < dim && evaluations < s.max_local_evaluations; ++d) {
      for (double dir : {1.0, -1.0}) {
        UnitPoint trial = start.x;
        trial[d] = std::clamp(trial[d] + dir * step, 0.0, 1.0);
        if (trial[d] == start.x[d]) continue;
        const double v = score(trial);
        ++evaluations;
        if (v > start.value) {
          start = {std::move(trial), v};
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return start;
}

}  // namespace

ScoredPoint maximize_acquisition(std::size_t dim, const ScoreFunction& score, std::uint64_t seed,
                                 std::span<const UnitPoint> extra_starts, const AcquisitionSearch& search) {
  if (dim == 0) throw ParameterError("maximize_acquisition needs dim >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<ScoredPoint> pool;
  pool.reserve(std::size_t(std::max(0, search.candidates)) + extra_starts.size());
  for (int i = 0; i < search.candidates; ++i) {
    UnitPoint u(dim);
    for (auto& v : u) v = uniform(rng);
    const double value = score(u);
    pool.push_back({std::move(u), value});
  }
  for (const auto& start : extra_starts) {
    if (start.size() != dim) throw ParameterError("acquisition start point has wrong dimension");
    UnitPoint u(start.size());
    std::transform(start.begin(), start.end(), u.begin(), [](double v) { return std::clamp(v, 0.0, 1.0); });
    const double value = score(u);
    pool.push_back({std::move(u), value});
  }
  if (pool.empty()) {
    UnitPoint center(dim, 0.5);
    const double value = score(center);
    pool.push_back({std::move(center), value});
  }
  const std::size_t k = std::min(pool.size(), std::size_t(std::max(1, search.refinements)));
  std::partial_sort(pool.begin(), pool.begin() + std::ptrdiff_t(k), pool.end(), better);
  ScoredPoint best = pool.front();
  for (std::size_t i = 0; i < k; ++i) {
    auto refined = compass_search(dim, score, pool[i], search);
    if (better(refined, best)) best = std::move(refined);
  }
  return best;
}

void CostModel::record(TaskKind task, double seconds) {
  const std::size_t slot = task == TaskKind::ConstraintOnly ? 1 : 0;
  sum_[slot] += seconds;
  ++count_[slot];
}

std::optional<double> CostModel::estimate(TaskKind task) const {
  const std::size_t slot = task == TaskKind::ConstraintOnly ? 1 : 0;
  if (count_[slot] == 0) return std::nullopt;
  return sum_[slot] / count_[slot];
}

}  // namespace cbo
