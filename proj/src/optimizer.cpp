#include "cbo/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <random>

#include "cbo/errors.hpp"

namespace cbo {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  auto splitmix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return splitmix(splitmix(splitmix(seed) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

OptimizerSettings OptimizerSettings::coupled(double threshold_wpm, std::uint64_t seed) {
  OptimizerSettings s;
  s.mode = Mode::Coupled;
  s.constraint = {threshold_wpm, 0.01};
  s.budget = 125;
  s.seed = seed;
  return s;
}

OptimizerSettings OptimizerSettings::decoupled(double threshold_wpm, std::uint64_t seed) {
  OptimizerSettings s;
  s.mode = Mode::Decoupled;
  s.constraint = {threshold_wpm, 0.05};
  s.budget = 250;
  s.seed = seed;
  return s;
}

void OptimizerSettings::validate() const {
  constraint.validate();
  if (n_init < 1) throw ParameterError("n_init must be at least 1");
  if (budget < n_init) throw ParameterError("budget must be at least n_init");
  if (max_consecutive_constraint < 1) throw ParameterError("max_consecutive_constraint must be at least 1");
}

int History::objective_evaluations() const {
  return int(std::count_if(observations.begin(), observations.end(),
                           [](const Observation& o) { return o.task != TaskKind::ConstraintOnly; }));
}

int History::constraint_evaluations() const {
  return int(std::count_if(observations.begin(), observations.end(),
                           [](const Observation& o) { return o.task != TaskKind::ObjectiveOnly; }));
}

Recommendation recommend(const std::vector<Observation>& observations, const SearchSpace& space,
                         const Surrogate& objective, const ConstraintModel& constraint) {
  // Unique observed configurations in first-seen order, with their best raw objective.
  std::vector<RawPoint> points;
  std::map<RawPoint, std::optional<double>> best_raw;
  bool any_objective = false;
  for (const auto& o : observations) {
    if (o.failed) continue;
    auto [it, inserted] = best_raw.try_emplace(o.x, std::nullopt);
    if (inserted) points.push_back(o.x);
    if (o.objective_value) {
      any_objective = true;
      if (!it->second || *o.objective_value > *it->second) it->second = o.objective_value;
    }
  }
  if (points.empty()) throw ParameterError("recommend needs at least one successful observation");

  std::optional<Recommendation> best_trusted;
  std::optional<Recommendation> best_pof;
  for (const auto& x : points) {
    const auto& observed = best_raw.at(x);
    if (any_objective && !observed) continue;
    const UnitPoint u = space.to_unit(x);
    Recommendation r;
    r.x = x;
    r.posterior_objective_mean = objective.predict(u).mean;
    r.prob_feasible = constraint.prob_feasible(u);
    r.feasible_under_model = is_trusted(r.prob_feasible, constraint.spec().tolerance);
    r.observed_objective = observed;
    if (r.feasible_under_model && (!best_trusted || r.posterior_objective_mean > best_trusted->posterior_objective_mean))
      best_trusted = r;
    if (!best_pof || r.prob_feasible > best_pof->prob_feasible) best_pof = r;
  }
  if (best_trusted) return *best_trusted;
  best_pof->fallback_used = true;
  return *best_pof;
}

ConstrainedOptimizer::ConstrainedOptimizer(SearchSpace space, Evaluator& evaluator, OptimizerSettings settings)
    : space_(std::move(space)),
      evaluator_(evaluator),
      settings_(std::move(settings)),
      objective_(space_.dim(), settings_.objective_model),
      constraint_(settings_.constraint, space_.dim(), settings_.constraint_model) {
  settings_.validate();
  history_.settings = settings_;
}

Observation ConstrainedOptimizer::evaluate(const RawPoint& x, TaskKind task, int iteration) {
  Observation obs;
  obs.x = x;
  obs.task = task;
  obs.iteration_index = iteration;
  const auto result = evaluator_.evaluate({x, task, mix_seed(settings_.seed, std::uint64_t(iteration), 2)});
  obs.objective_value = result.objective;
  obs.constraint_value_raw = result.speed_wpm;
  obs.duration_seconds = result.wall_seconds;
  if (task != TaskKind::ConstraintOnly && !obs.objective_value)
    throw EvaluationError("evaluator returned no objective for an objective task");
  if (task != TaskKind::ObjectiveOnly && !obs.constraint_value_raw)
    throw EvaluationError("evaluator returned no speed for a constraint task");
  return obs;
}

void ConstrainedOptimizer::absorb(Observation& obs, std::uint64_t refit_seed) {
  if (obs.failed) return;
  costs_.record(obs.task, obs.duration_seconds);
  const UnitPoint u = space_.to_unit(obs.x);
  if (obs.objective_value) {
    objective_.add(u, *obs.objective_value);
    objective_.refit(refit_seed);
  }
  if (obs.constraint_value_raw) {
    constraint_.append(u, *obs.constraint_value_raw);
    constraint_.refit(refit_seed ^ 0x5bd1e995ULL);
  }
}

void ConstrainedOptimizer::notify(const Observation& obs) {
  history_.observations.push_back(obs);
  if (!callback_) return;
  std::optional<Recommendation> incumbent;
  if (objective_.size() > 0) incumbent = recommend();
  callback_(history_.observations.back(), incumbent);
}

void ConstrainedOptimizer::initialize() {
  if (!history_.observations.empty()) throw ParameterError("optimizer already initialized");
  std::mt19937_64 rng(mix_seed(settings_.seed, 0xd0));
  for (int i = 0; i < settings_.n_init; ++i) {
    const RawPoint x = space_.sample_uniform(rng);
    Observation obs;
    try {
      obs = evaluate(x, TaskKind::Both, i);
    } catch (const EvaluationError& e) {
      std::string at;
      for (std::size_t d = 0; d < x.size(); ++d) at += (d ? "," : "") + std::to_string(x[d]);
      throw EvaluationError(std::string(e.what()) + " [initial design point (" + at + ")]", e.captured_output());
    }
    absorb(obs, mix_seed(settings_.seed, std::uint64_t(i), 3));
    notify(obs);
  }
}

std::vector<UnitPoint> ConstrainedOptimizer::observed_unit_points() const {
  std::vector<UnitPoint> pts;
  for (const auto& o : history_.observations)
    if (!o.failed) pts.push_back(space_.to_unit(o.x));
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

std::optional<double> ConstrainedOptimizer::incumbent() const {
  std::optional<double> best;
  for (const auto& o : history_.observations) {
    if (o.failed || !o.objective_value) continue;
    if (best && *o.objective_value <= *best) continue;
    if (constraint_.is_trusted(space_.to_unit(o.x))) best = o.objective_value;
  }
  return best;
}

Recommendation ConstrainedOptimizer::recommend() const {
  return cbo::recommend(history_.observations, space_, objective_, constraint_);
}

void ConstrainedOptimizer::step() {
  if (history_.observations.empty()) throw ParameterError("call initialize() before step()");
  if (exhausted()) throw ParameterError("evaluation budget exhausted");
  using clock = std::chrono::steady_clock;
  const int iteration = history_.iterations();
  const auto started = clock::now();

  const auto best = incumbent();
  const auto starts = observed_unit_points();
  const std::uint64_t acq_seed = mix_seed(settings_.seed, std::uint64_t(iteration), 1);

  Suggestion suggestion;
  if (settings_.mode == Mode::Coupled) {
    const auto score = [&](std::span<const double> u) {
      return constrained_acquisition(space_.snap(u), objective_, constraint_, best);
    };
    const auto top = maximize_acquisition(space_.dim(), score, acq_seed, starts, settings_.acquisition);
    suggestion = {space_.snap(top.x), TaskKind::Both, top.value, costs_.estimate(TaskKind::Both).value_or(1.0)};
  } else {
    const auto obj_score = [&](std::span<const double> u) {
      return decoupled_utilities(space_.snap(u), objective_, constraint_, best).objective;
    };
    const auto con_score = [&](std::span<const double> u) {
      return decoupled_utilities(space_.snap(u), objective_, constraint_, best).constraint;
    };
    const auto top_obj = maximize_acquisition(space_.dim(), obj_score, acq_seed, starts, settings_.acquisition);
    const double cost_obj = std::max(costs_.estimate(TaskKind::ObjectiveOnly).value_or(1.0), 1e-9);
    if (consecutive_constraint_ >= settings_.max_consecutive_constraint) {
      suggestion = {space_.snap(top_obj.x), TaskKind::ObjectiveOnly, top_obj.value, cost_obj};
    } else {
      const auto top_con =
          maximize_acquisition(space_.dim(), con_score, mix_seed(acq_seed, 7), starts, settings_.acquisition);
      const double cost_con = std::max(
          costs_.estimate(TaskKind::ConstraintOnly).value_or(cost_obj * evaluator_.subset_fraction()), 1e-9);
      suggestion = select_task({space_.snap(top_obj.x), top_obj.value}, {space_.snap(top_con.x), top_con.value},
                               cost_obj, cost_con);
    }
    consecutive_constraint_ = suggestion.task == TaskKind::ConstraintOnly ? consecutive_constraint_ + 1 : 0;
  }
  const double suggest_seconds = std::chrono::duration<double>(clock::now() - started).count();

  const RawPoint x = space_.from_unit(suggestion.x);
  Observation obs;
  try {
    obs = evaluate(x, suggestion.task, iteration);
  } catch (const EvaluationError& e) {
    obs = Observation{};
    obs.x = x;
    obs.task = suggestion.task;
    obs.iteration_index = iteration;
    obs.failed = true;
    obs.failure = e.what();
  }
  const auto refit_started = clock::now();
  absorb(obs, mix_seed(settings_.seed, std::uint64_t(iteration), 3));
  const double refit_seconds = std::chrono::duration<double>(clock::now() - refit_started).count();
  obs.overhead_seconds = settings_.measure_overhead ? suggest_seconds + refit_seconds : 0.0;
  notify(obs);
}

RunResult run(const SearchSpace& space, Evaluator& evaluator, const OptimizerSettings& settings,
              ObservationCallback callback) {
  ConstrainedOptimizer opt(space, evaluator, settings);
  opt.set_callback(std::move(callback));
  opt.initialize();
  while (!opt.exhausted()) opt.step();
  return {opt.history(), opt.recommend()};
}

}  // namespace cbo
