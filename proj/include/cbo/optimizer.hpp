#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cbo/acquisition.hpp"
#include "cbo/constraint_model.hpp"
#include "cbo/evaluator.hpp"
#include "cbo/search_space.hpp"
#include "cbo/surrogate.hpp"

namespace cbo {

enum class Mode { Coupled, Decoupled };

struct Observation {
  RawPoint x;
  TaskKind task = TaskKind::Both;
  std::optional<double> objective_value;
  std::optional<double> constraint_value_raw;  // words per minute
  double duration_seconds = 0.0;
  int iteration_index = 0;
  double overhead_seconds = 0.0;  // suggestion + refit time for this iteration
  bool failed = false;
  std::string failure;
};

struct OptimizerSettings {
  Mode mode = Mode::Coupled;
  ConstraintSpec constraint{2000.0, 0.01};
  int budget = 125;  // iterations, initial design included
  int n_init = 3;
  std::uint64_t seed = 0;
  AcquisitionSearch acquisition{};
  ModelPolicy objective_model{};
  ModelPolicy constraint_model{};
  int max_consecutive_constraint = 10;
  bool measure_overhead = true;  // false records zero overhead (byte-identical traces)

  /// delta = 0.01, budget 125.
  static OptimizerSettings coupled(double threshold_wpm, std::uint64_t seed = 0);
  /// delta = 0.05, budget 250.
  static OptimizerSettings decoupled(double threshold_wpm, std::uint64_t seed = 0);
  void validate() const;
};

struct History {
  std::vector<Observation> observations;
  OptimizerSettings settings;

  int objective_evaluations() const;
  int constraint_evaluations() const;
  int iterations() const { return static_cast<int>(observations.size()); }
};

struct Recommendation {
  RawPoint x;
  double posterior_objective_mean = 0.0;
  double prob_feasible = 0.0;
  bool feasible_under_model = false;
  bool fallback_used = false;
  std::optional<double> observed_objective;  // best raw measurement at x
};

/// Best posterior objective mean among observed points with PoF >= 1 - tolerance; the
/// max-PoF observed point (fallback_used) when none qualifies. Throws on empty history.
Recommendation recommend(const std::vector<Observation>& observations, const SearchSpace& space,
                         const Surrogate& objective, const ConstraintModel& constraint);

/// Called once per evaluation, after the models absorbed it. `incumbent` is the
/// recommendation under the updated models (absent before any objective data).
using ObservationCallback = std::function<void(const Observation&, const std::optional<Recommendation>& incumbent)>;

/// Sequential constrained Bayesian optimization (coupled or decoupled).
class ConstrainedOptimizer {
 public:
  ConstrainedOptimizer(SearchSpace space, Evaluator& evaluator, OptimizerSettings settings);

  void set_callback(ObservationCallback cb) { callback_ = std::move(cb); }

  /// Evaluates n_init uniform random points with task Both. Evaluation errors propagate.
  void initialize();
  /// One suggest -> evaluate -> refit iteration. Throws if the budget is exhausted.
  void step();
  bool exhausted() const { return history_.iterations() >= settings_.budget; }

  Recommendation recommend() const;
  /// Best observed objective among model-trusted points.
  std::optional<double> incumbent() const;

  const History& history() const noexcept { return history_; }
  const Surrogate& objective_model() const noexcept { return objective_; }
  const ConstraintModel& constraint_model() const noexcept { return constraint_; }
  const SearchSpace& space() const noexcept { return space_; }
  int consecutive_constraint_steps() const noexcept { return consecutive_constraint_; }

 private:
  Observation evaluate(const RawPoint& x, TaskKind task, int iteration);
  void absorb(Observation& obs, std::uint64_t refit_seed);
  void notify(const Observation& obs);
  std::vector<UnitPoint> observed_unit_points() const;

  SearchSpace space_;
  Evaluator& evaluator_;
  OptimizerSettings settings_;
  Surrogate objective_;
  ConstraintModel constraint_;
  CostModel costs_;
  History history_;
  ObservationCallback callback_;
  int consecutive_constraint_ = 0;
};

struct RunResult {
  History history;
  Recommendation recommendation;
};

RunResult run(const SearchSpace& space, Evaluator& evaluator, const OptimizerSettings& settings,
              ObservationCallback callback = {});

/// Deterministic 64-bit mixing for deriving per-iteration seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace cbo
