#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cbo/constraint_model.hpp"
#include "cbo/search_space.hpp"
#include "cbo/surrogate.hpp"

namespace cbo {

/// What an evaluation measures: coupled runs always use Both.
enum class TaskKind { Both, ObjectiveOnly, ConstraintOnly };

std::string_view to_string(TaskKind task);
TaskKind task_from_string(std::string_view name);

struct Suggestion {
  UnitPoint x;
  TaskKind task = TaskKind::Both;
  double acquisition_value = 0.0;
  double predicted_cost_seconds = 1.0;
};

/// sigma (z Phi(z) + phi(z)) with z = (mean - incumbent) / sigma; max(mean - incumbent, 0) when sigma = 0.
double expected_improvement(const PosteriorPrediction& objective, double incumbent);

/// Natural-log binary entropy, 0 at p = 0 and p = 1.
double binary_entropy(double p);

/// EI x PoF against a feasible incumbent; PoF alone when there is none.
double constrained_acquisition(const PosteriorPrediction& objective, double pof, std::optional<double> incumbent);
double constrained_acquisition(std::span<const double> x, const Surrogate& objective, const ConstraintModel& constraint,
                               std::optional<double> incumbent);

struct DecoupledUtilities {
  double objective = 0.0;   // EI x PoF
  double constraint = 0.0;  // EI x H_b(PoF)
};

/// Without an incumbent EI is replaced by 1, so the utilities become PoF and H_b(PoF).
DecoupledUtilities decoupled_utilities(const PosteriorPrediction& objective, double pof,
                                       std::optional<double> incumbent);
DecoupledUtilities decoupled_utilities(std::span<const double> x, const Surrogate& objective,
                                       const ConstraintModel& constraint, std::optional<double> incumbent);

struct ScoredPoint {
  UnitPoint x;
  double value = 0.0;
};

/// Picks the task with the larger utility per second; ties go to ObjectiveOnly.
Suggestion select_task(const ScoredPoint& best_objective, const ScoredPoint& best_constraint, double cost_objective_s,
                       double cost_constraint_s);

struct AcquisitionSearch {
  int candidates = 512;
  int refinements = 5;
  double initial_step = 0.1;
  double min_step = 1e-3;
  int max_local_evaluations = 400;
};

using ScoreFunction = std::function<double(std::span<const double>)>;

/// Scores `candidates` uniform points plus every `extra_starts` point, then refines the
/// best `refinements` by compass search in the unit cube. Deterministic given the seed;
/// independent of the order of `extra_starts`.
ScoredPoint maximize_acquisition(std::size_t dim, const ScoreFunction& score, std::uint64_t seed,
                                 std::span<const UnitPoint> extra_starts = {}, const AcquisitionSearch& search = {});

/// Running mean of observed durations per task. Both and ObjectiveOnly share the
/// full-set estimate since both decode the full set.
class CostModel {
 public:
  void record(TaskKind task, double seconds);
  std::optional<double> estimate(TaskKind task) const;

 private:
  std::array<double, 2> sum_{0.0, 0.0};
  std::array<int, 2> count_{0, 0};
};

}  // namespace cbo
