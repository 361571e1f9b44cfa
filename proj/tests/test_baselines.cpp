#include <doctest.h>

#include <algorithm>

#include "cbo/baselines.hpp"
#include "cbo/errors.hpp"

using namespace cbo;

namespace {

/// Constant-speed evaluator for boundary tests.
class FixedSpeed : public Evaluator {
 public:
  explicit FixedSpeed(double wpm) : wpm_(wpm) {}
  EvaluationResult evaluate(const EvaluationRequest& r) override {
    EvaluationResult out;
    out.objective = 30.0 + r.x[0];
    out.speed_wpm = wpm_;
    out.words_translated = 100;
    out.wall_seconds = 6000.0 / wpm_;
    return out;
  }
  double subset_fraction() const override { return 0.04; }

 private:
  double wpm_;
};

void check_best(const BaselineResult& r, double threshold) {
  if (!r.best) return;
  CHECK(*r.best_speed_wpm > threshold);
  for (const auto& o : r.history.observations)
    if (o.constraint_value_raw && *o.constraint_value_raw > threshold) CHECK(*r.best_objective >= *o.objective_value);
}

}  // namespace

TEST_CASE("grid search") {
  SimulatedDecoder sim(SimulatorConfig::calibrated());
  const auto space = SearchSpace::decoder_default();
  const auto g5 = grid_search(space, sim, {2000, 0.01}, 5, 1);
  CHECK(g5.history.iterations() == 125);
  const auto has = [&](const RawPoint& x) {
    return std::any_of(g5.history.observations.begin(), g5.history.observations.end(),
                       [&](const Observation& o) { return o.x == x; });
  };
  CHECK(has({5, 22, 31}));
  CHECK(has({2, 22, 31}));
  CHECK(has({10, 22, 100}));
  check_best(g5, 2000);
  REQUIRE(g5.best.has_value());

  const auto grid = space.grid_values(5);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(g5.history.observations[i].x == grid[i]);
  for (const auto& o : g5.history.observations) {
    CHECK(o.task == TaskKind::Both);
    CHECK(o.overhead_seconds == 0.0);
  }

  CHECK(grid_search(space, sim, {2000, 0.01}, 2, 1).history.iterations() == 8);
  CHECK_FALSE(grid_search(space, sim, {1e9, 0.01}, 2, 1).best.has_value());
  CHECK_THROWS_AS(grid_search(space, sim, {2000, 0.01}, 1, 1), ParameterError);
}

TEST_CASE("random search") {
  SimulatedDecoder sim(SimulatorConfig::calibrated());
  const auto space = SearchSpace::decoder_default();
  const auto a = random_search(space, sim, {2000, 0.01}, 125, 7);
  const auto b = random_search(space, sim, {2000, 0.01}, 125, 7);
  CHECK(a.history.iterations() == 125);
  for (int i = 0; i < 125; ++i) {
    REQUIRE(a.history.observations[i].x == b.history.observations[i].x);
    REQUIRE(a.history.observations[i].objective_value == b.history.observations[i].objective_value);
  }
  check_best(a, 2000);
  CHECK(a.best == b.best);
  CHECK_FALSE(random_search(space, sim, {1e9, 0.01}, 20, 7).best.has_value());
  CHECK_THROWS_AS(random_search(space, sim, {2000, 0.01}, 0, 7), ParameterError);
}

TEST_CASE("baseline feasibility is strict on measured speed") {
  const auto space = SearchSpace::decoder_default();
  FixedSpeed at(2000.0), above(2000.5);
  CHECK_FALSE(grid_search(space, at, {2000, 0.01}, 2).best.has_value());
  const auto r = grid_search(space, above, {2000, 0.01}, 2);
  REQUIRE(r.best.has_value());
  CHECK((*r.best)[0] == 10);
  int seen = 0;
  random_search(space, above, {2000, 0.01}, 9, 1, [&](const Observation&, const BaselineResult& so_far) {
    ++seen;
    CHECK(so_far.best.has_value());
  });
  CHECK(seen == 9);
}
