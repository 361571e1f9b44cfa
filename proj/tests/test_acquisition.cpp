#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cbo/acquisition.hpp"
#include "cbo/errors.hpp"

using namespace cbo;

TEST_CASE("task names") {
  CHECK(to_string(TaskKind::Both) == "both");
  CHECK(task_from_string("objective") == TaskKind::ObjectiveOnly);
  CHECK(task_from_string("constraint") == TaskKind::ConstraintOnly);
  CHECK_THROWS(task_from_string("speed"));
}

TEST_CASE("expected improvement") {
  CHECK(expected_improvement({37.0, 0.0}, 36.0) == doctest::Approx(1.0));
  CHECK(expected_improvement({35.0, 0.0}, 36.0) == 0.0);
  CHECK(expected_improvement({36.0, 1.0}, 36.0) == doctest::Approx(1.0 / std::sqrt(2 * M_PI)).epsilon(1e-12));
  CHECK(expected_improvement({26.0, 0.01}, 36.0) < 1e-15);

  for (double mu = -3; mu <= 3; mu += 0.25) {
    double prev = 0.0;
    for (double sd = 0.01; sd < 5; sd *= 1.3) {
      const double ei = expected_improvement({mu, sd * sd}, 0.0);
      REQUIRE(ei >= 0.0);
      if (mu < 0) {
        if (prev > 0.0) REQUIRE(ei > prev);
        else REQUIRE(ei >= prev);
        prev = ei;
      }
    }
  }
}

TEST_CASE("constrained acquisition") {
  CHECK(constrained_acquisition({40.0, 1.0}, 0.0, 36.0) == 0.0);
  CHECK(constrained_acquisition({40.0, 1.0}, 0.7, std::nullopt) == doctest::Approx(0.7));
  // EI = 0.2 at PoF 0.5: build a prediction with sigma = 0 and mean = incumbent + 0.2
  CHECK(constrained_acquisition({36.2, 0.0}, 0.5, 36.0) == doctest::Approx(0.1));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    const PosteriorPrediction p{35 + 2 * u(rng), u(rng)};
    const double pof = u(rng);
    const double ei = expected_improvement(p, 36.0);
    REQUIRE(constrained_acquisition(p, pof, 36.0) <= ei + 1e-15);
    REQUIRE(constrained_acquisition(p, pof, 36.0) >= 0.0);
  }
}

TEST_CASE("decoupled utilities") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == doctest::Approx(std::log(2.0)));
  const auto certain = decoupled_utilities({36.2, 0.0}, 1.0, 36.0);
  CHECK(certain.constraint == 0.0);
  CHECK(certain.objective == doctest::Approx(0.2));
  const auto half = decoupled_utilities({36.2, 0.0}, 0.5, 36.0);
  CHECK(half.constraint == doctest::Approx(0.2 * std::log(2.0)));
  CHECK(half.constraint == doctest::Approx(0.1386).epsilon(1e-3));
  const auto hopeless = decoupled_utilities({35.0, 0.0}, 0.5, 36.0);
  CHECK(hopeless.objective == 0.0);
  CHECK(hopeless.constraint == 0.0);
  CHECK(decoupled_utilities({40.0, 1.0}, 0.0, 36.0).constraint == 0.0);
  CHECK(decoupled_utilities({40.0, 1.0}, 0.0, 36.0).objective == 0.0);
}

TEST_CASE("task selection by utility per second") {
  const ScoredPoint obj{{0.1}, 0.2}, con{{0.9}, 0.1};
  CHECK(select_task(obj, con, 10.0, 10.0).task == TaskKind::ObjectiveOnly);
  const auto s = select_task(obj, con, 100.0, 2.0);
  CHECK(s.task == TaskKind::ConstraintOnly);
  CHECK(s.x == UnitPoint{0.9});
  CHECK(s.predicted_cost_seconds == doctest::Approx(2.0));
  CHECK(select_task(obj, {{0.9}, 0.4}, 1.0, 2.0).task == TaskKind::ObjectiveOnly);  // tie
  CHECK_THROWS_AS(select_task(obj, con, 0.0, 1.0), ParameterError);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 10);
  for (int i = 0; i < 2000; ++i) {
    const ScoredPoint a{{0.0}, u(rng)}, b{{1.0}, u(rng)};
    const double ca = u(rng), cb = u(rng), f = u(rng);
    REQUIRE(select_task(a, b, ca, cb).task == select_task(a, b, ca * f, cb * f).task);
  }
}

TEST_CASE("acquisition maximizer") {
  const ScoreFunction toy = [](std::span<const double> x) { return 1.0 - (x[0] - 0.3) * (x[0] - 0.3); };
  const auto best = maximize_acquisition(1, toy, 5);
  CHECK(std::fabs(best.x[0] - 0.3) < 1e-2);

  const ScoreFunction bumpy = [](std::span<const double> x) {
    return std::sin(9 * x[0]) * std::cos(7 * x[1]) + 0.3 * x[2];
  };
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  std::vector<UnitPoint> seeds;
  for (int i = 0; i < 20; ++i) seeds.push_back({u(rng), u(rng), u(rng)});
  const auto r = maximize_acquisition(3, bumpy, 9, seeds);
  for (double v : r.x) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  for (auto s : seeds) {
    for (auto& v : s) v = std::clamp(v, 0.0, 1.0);
    CHECK(r.value >= bumpy(s));
  }
  CHECK(r.value == doctest::Approx(bumpy(r.x)));

  auto shuffled = seeds;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto r2 = maximize_acquisition(3, bumpy, 9, shuffled);
  CHECK(r2.x == r.x);
  CHECK(r2.value == r.value);
}

TEST_CASE("cost model keeps separate running means") {
  CostModel c;
  CHECK_FALSE(c.estimate(TaskKind::Both).has_value());
  c.record(TaskKind::Both, 100.0);
  c.record(TaskKind::ObjectiveOnly, 200.0);
  c.record(TaskKind::ConstraintOnly, 4.0);
  CHECK(*c.estimate(TaskKind::Both) == doctest::Approx(150.0));
  CHECK(*c.estimate(TaskKind::ObjectiveOnly) == doctest::Approx(150.0));
  CHECK(*c.estimate(TaskKind::ConstraintOnly) == doctest::Approx(4.0));
}
