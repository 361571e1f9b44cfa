#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cbo/errors.hpp"
#include "cbo/gp.hpp"
#include "cbo/surrogate.hpp"
#include "oracle.hpp"

using namespace cbo;

namespace {

std::vector<double> targets(const std::vector<UnitPoint>& X) {
  std::vector<double> y;
  for (const auto& x : X) y.push_back(oracle::smooth(x));
  return y;
}

}  // namespace

TEST_CASE("kernel closed forms") {
  const auto hp = GPHyperparams::isotropic(1, 1.0, 1.0, 0.0);
  const std::vector<double> a{0.0}, b{1.0}, far{50.0};
  CHECK(kernel_eval(hp, a, a) == doctest::Approx(1.0));
  const double expect = (1.0 + std::sqrt(5.0) + 5.0 / 3.0) * std::exp(-std::sqrt(5.0));
  CHECK(kernel_eval(hp, a, b) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(std::fabs(kernel_eval(hp, a, b) - 0.52399) < 1e-4);
  CHECK(kernel_eval(hp, a, far) < 1e-15);

  const auto hp2 = GPHyperparams::isotropic(3, 2.5, 0.4, 0.0);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const auto P = oracle::random_points(rng, 2, 3);
    CHECK(kernel_eval(hp2, P[0], P[1]) == kernel_eval(hp2, P[1], P[0]));
    CHECK(kernel_eval(hp2, P[0], P[1]) ==
          doctest::Approx(oracle::matern52(2.5, hp2.lengthscales, P[0], P[1])).epsilon(1e-13));
  }
}

TEST_CASE("single observation interpolation and prior reversion") {
  const auto hp = GPHyperparams::isotropic(1, 1.0, 0.2, 0.0);
  const auto gp = GaussianProcess::fit(hp, {{0.3}}, std::vector<double>{1.7});
  const auto at = gp.predict(std::vector<double>{0.3});
  CHECK(at.mean == doctest::Approx(1.7).epsilon(1e-9));
  CHECK(at.variance == doctest::Approx(0.0).epsilon(1e-7));

  const auto noisy = GaussianProcess::fit(GPHyperparams::isotropic(1, 2.0, 0.2, 0.1), {{0.3}}, std::vector<double>{1.7});
  const auto far = noisy.predict_observed(std::vector<double>{40.0});
  CHECK(far.mean == doctest::Approx(0.0));
  CHECK(far.variance == doctest::Approx(2.1));
  CHECK(noisy.predict(std::vector<double>{40.0}).variance == doctest::Approx(2.0));

  const GaussianProcess prior(GPHyperparams::isotropic(2, 3.0, 0.5, 0.1), 2);
  CHECK(prior.predict(std::vector<double>{0.1, 0.2}).mean == 0.0);
  CHECK(prior.predict(std::vector<double>{0.1, 0.2}).variance == doctest::Approx(3.0));
}

TEST_CASE("two observations match a 2x2 direct solve") {
  const auto hp = GPHyperparams::isotropic(1, 1.3, 0.35, 0.01);
  const std::vector<UnitPoint> X{{0.2}, {0.6}};
  const std::vector<double> y{0.5, -1.0};
  const auto gp = GaussianProcess::fit(hp, X, y);
  const double k11 = oracle::matern52(1.3, hp.lengthscales, X[0], X[0]) + 0.01;
  const double k12 = oracle::matern52(1.3, hp.lengthscales, X[0], X[1]);
  const double k22 = k11;
  const double det = k11 * k22 - k12 * k12;
  for (double q : {0.0, 0.4, 0.9}) {
    const std::vector<double> x{q};
    const double a = oracle::matern52(1.3, hp.lengthscales, X[0], x);
    const double b = oracle::matern52(1.3, hp.lengthscales, X[1], x);
    // inverse of [[k11,k12],[k12,k22]] applied by hand
    const double w1 = (k22 * y[0] - k12 * y[1]) / det, w2 = (k11 * y[1] - k12 * y[0]) / det;
    const double v1 = (k22 * a - k12 * b) / det, v2 = (k11 * b - k12 * a) / det;
    const auto p = gp.predict(x);
    CHECK(std::fabs(p.mean - (a * w1 + b * w2)) < 1e-8);
    CHECK(std::fabs(p.variance - (1.3 - a * v1 - b * v2)) < 1e-8);
  }
}

TEST_CASE("symmetric targets give zero mean at the midpoint") {
  const auto gp = GaussianProcess::fit(GPHyperparams::isotropic(1, 1.0, 0.3, 0.0), {{0.2}, {0.8}},
                                       std::vector<double>{2.0, -2.0});
  CHECK(std::fabs(gp.predict(std::vector<double>{0.5}).mean) < 1e-12);
}

TEST_CASE("posterior matches the dense-solve oracle on random data") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 5 + std::size_t(trial) * 4;
    const auto X = oracle::random_points(rng, n, 3);
    const auto y = targets(X);
    const GPHyperparams hp{1.7, {0.3, 0.5, 0.8}, 1e-4};
    const auto gp = GaussianProcess::fit(hp, X, y);
    REQUIRE(gp.jitter() == 0.0);
    for (const auto& q : oracle::random_points(rng, 10, 3)) {
      const auto ref = oracle::posterior(hp.amplitude, hp.lengthscales, hp.noise_variance, X, y, q);
      const auto p = gp.predict(q);
      REQUIRE(std::fabs(p.mean - ref.mean) < 1e-8);
      REQUIRE(std::fabs(p.variance - ref.variance) < 1e-8);
    }
  }
}

TEST_CASE("posterior invariants") {
  std::mt19937_64 rng(5);
  const auto X = oracle::random_points(rng, 25, 3);
  const auto y = targets(X);

  SUBCASE("variance bounded") {
    const GPHyperparams hp{2.0, {0.2, 0.3, 0.4}, 0.05};
    const auto gp = GaussianProcess::fit(hp, X, y);
    for (const auto& q : oracle::random_points(rng, 200, 3)) {
      const auto p = gp.predict_observed(q);
      REQUIRE(p.variance >= 0.0);
      REQUIRE(p.variance <= hp.amplitude + hp.noise_variance + 1e-8);
    }
  }
  SUBCASE("noise-free interpolation") {
    const GPHyperparams hp{1.0, {0.3, 0.3, 0.3}, 0.0};
    const auto gp = GaussianProcess::fit(hp, X, y);
    for (std::size_t i = 0; i < X.size(); ++i) REQUIRE(std::fabs(gp.predict(X[i]).mean - y[i]) < 1e-6);
  }
  SUBCASE("permutation invariance") {
    const GPHyperparams hp{1.0, {0.3, 0.4, 0.5}, 1e-3};
    std::vector<std::size_t> idx(X.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<UnitPoint> Xp;
    std::vector<double> yp;
    for (auto i : idx) {
      Xp.push_back(X[i]);
      yp.push_back(y[i]);
    }
    const auto a = GaussianProcess::fit(hp, X, y), b = GaussianProcess::fit(hp, Xp, yp);
    for (const auto& q : oracle::random_points(rng, 50, 3)) {
      REQUIRE(std::fabs(a.predict(q).mean - b.predict(q).mean) < 1e-8);
      REQUIRE(std::fabs(a.predict(q).variance - b.predict(q).variance) < 1e-8);
    }
  }
}

TEST_CASE("fit validates its inputs and escalates jitter") {
  const auto hp = GPHyperparams::isotropic(1, 1.0, 0.3, 0.0);
  CHECK_THROWS_AS(GaussianProcess::fit(hp, {{0.1}, {0.2}}, std::vector<double>{1.0}), ParameterError);
  CHECK_THROWS_AS(GaussianProcess::fit(GPHyperparams::isotropic(1, -1.0, 0.3, 0.0), {{0.1}}, std::vector<double>{1.0}),
                  ParameterError);
  // Exact duplicates with zero noise make the Gram matrix singular: jitter must rescue it.
  const auto gp = GaussianProcess::fit(hp, {{0.1}, {0.1}, {0.5}}, std::vector<double>{1.0, 1.0, 0.0});
  CHECK(gp.jitter() >= kJitterStart);
  CHECK(gp.jitter() <= kJitterMax);
  CHECK(gp.predict(std::vector<double>{0.1}).mean == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("log marginal likelihood closed forms and oracle") {
  const auto hp = GPHyperparams::isotropic(1, 1.0, 0.5, 0.0);
  CHECK(std::fabs(log_marginal_likelihood(hp, {{0.4}}, std::vector<double>{0.0}) + 0.5 * std::log(2 * M_PI)) < 1e-6);
  CHECK(std::fabs(log_marginal_likelihood(hp, {{0.4}}, std::vector<double>{1.0}) - (-0.5 - 0.5 * std::log(2 * M_PI))) <
        1e-6);
  CHECK(log_marginal_likelihood(hp, {{0.4}}, std::vector<double>{0.0}) == doctest::Approx(-0.9189).epsilon(1e-4));

  const auto noisy = GPHyperparams::isotropic(1, 1.0, 0.5, 0.1);
  CHECK(std::isfinite(log_marginal_likelihood(noisy, {{0.4}, {0.4}}, std::vector<double>{1.0, 1.0})));

  std::mt19937_64 rng(9);
  const auto X = oracle::random_points(rng, 12, 3);
  const auto y = targets(X);
  const GPHyperparams h{0.8, {0.2, 0.5, 1.1}, 0.02};
  CHECK(log_marginal_likelihood(h, X, y) ==
        doctest::Approx(oracle::lml(0.8, h.lengthscales, 0.02, X, y)).epsilon(1e-10));
  CHECK(GaussianProcess::fit(h, X, y).log_marginal_likelihood() == doctest::Approx(log_marginal_likelihood(h, X, y)));
}

TEST_CASE("analytic LML gradient matches finite differences") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const auto X = oracle::random_points(rng, 15, 3);
    auto y = targets(X);
    const GPHyperparams hp{0.5 + trial * 0.4, {0.2 + 0.1 * trial, 0.4, 0.7}, 0.01 * (trial + 1)};
    const auto res = log_marginal_likelihood_with_gradient(hp, X, y);
    REQUIRE(res.gradient.size() == 5);
    CHECK(res.value == doctest::Approx(log_marginal_likelihood(hp, X, y)));
    const double h = 1e-5;
    for (std::size_t k = 0; k < 5; ++k) {
      auto shifted = [&](double delta) {
        GPHyperparams p = hp;
        if (k == 0) p.amplitude *= std::exp(delta);
        else if (k == 4) p.noise_variance *= std::exp(delta);
        else p.lengthscales[k - 1] *= std::exp(delta);
        return oracle::lml(p.amplitude, p.lengthscales, p.noise_variance, X, y);
      };
      const double fd = (shifted(h) - shifted(-h)) / (2 * h);
      const double scale = std::max(std::fabs(fd), 1e-3);
      REQUIRE(std::fabs(res.gradient[k] - fd) / scale < 1e-4);
    }
  }
}

TEST_CASE("hyperparameter search") {
  SUBCASE("requires two points") {
    CHECK_THROWS_AS(optimize_hyperparams({{0.1, 0.1, 0.1}}, std::vector<double>{1.0},
                                         GPHyperparams::isotropic(3, 1, 0.3, 1e-3), HyperparamBounds{}),
                    ParameterError);
  }
  SUBCASE("bounds scale with the target variance") {
    const std::vector<double> y{1.0, 3.0};
    const auto b = HyperparamBounds::for_targets(y);
    CHECK(b.amplitude.lower == doctest::Approx(2e-4));
    CHECK(b.amplitude.upper == doctest::Approx(200.0));
    CHECK(b.noise.upper == doctest::Approx(2.0));
    const auto flat = HyperparamBounds::for_targets(std::vector<double>{4.0, 4.0});
    CHECK(flat.amplitude.upper == doctest::Approx(100.0));
  }
  SUBCASE("recovers a known lengthscale") {
    // Draw one sample path of a GP with lengthscale 0.25 at 50 points.
    std::mt19937_64 rng(1234);
    const double truth = 0.25;
    const auto X = oracle::random_points(rng, 50, 1);
    const auto K = oracle::gram(1.0, {truth}, 1e-4, X);
    // Cholesky by hand to sample.
    const std::size_t n = X.size();
    std::vector<std::vector<double>> L(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        double s = K[i][j];
        for (std::size_t k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
        L[i][j] = i == j ? std::sqrt(s) : s / L[j][j];
      }
    std::normal_distribution<double> z;
    std::vector<double> e(n), y(n, 0.0);
    for (auto& v : e) v = z(rng);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k <= i; ++k) y[i] += L[i][k] * e[k];
    const auto bounds = HyperparamBounds::for_targets(y);
    const auto init = GPHyperparams::isotropic(1, 1.0, 1.0, 1e-2);
    const auto fit = optimize_hyperparams(X, y, init, bounds, {4, 100, 1e-8, 3});
    CHECK_FALSE(fit.warning);
    CHECK(fit.hyperparams.lengthscales[0] > truth / 2);
    CHECK(fit.hyperparams.lengthscales[0] < truth * 2);
    CHECK(bounds.contains(fit.hyperparams));
    CHECK(fit.lml >= log_marginal_likelihood(bounds.clamp(init), X, y) - 1e-9);
  }
  SUBCASE("zero signal drives the amplitude to its lower bound") {
    std::mt19937_64 rng(2);
    const auto X = oracle::random_points(rng, 10, 3);
    const std::vector<double> y(10, 0.0);
    const auto bounds = HyperparamBounds::for_targets(y);
    const auto fit = optimize_hyperparams(X, y, GPHyperparams::isotropic(3, 1.0, 0.3, 1e-3), bounds);
    CHECK(fit.hyperparams.amplitude == doctest::Approx(bounds.amplitude.lower));
  }
  SUBCASE("never worse than the start and always within bounds") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 8; ++trial) {
      const auto X = oracle::random_points(rng, 6 + trial * 3, 3);
      auto y = targets(X);
      for (auto& v : y) v += 0.05 * std::normal_distribution<double>()(rng);
      const auto bounds = HyperparamBounds::for_targets(y);
      const GPHyperparams init{0.5, {0.05, 2.0, 0.3}, 1e-3};
      const auto fit = optimize_hyperparams(X, y, init, bounds, {2, 60, 1e-7, std::uint64_t(trial)});
      REQUIRE(bounds.contains(fit.hyperparams));
      REQUIRE(fit.lml >= log_marginal_likelihood(bounds.clamp(init), X, y) - 1e-9);
    }
  }
}

TEST_CASE("surrogate standardizes targets and predicts in original units") {
  std::mt19937_64 rng(8);
  const auto X = oracle::random_points(rng, 20, 3);
  Surrogate s(3);
  for (const auto& x : X) s.add(x, 36.0 + 0.3 * oracle::smooth(x));
  s.refit(1);
  CHECK(s.size() == 20);
  CHECK(s.offset() > 35.0);
  CHECK(s.scale() > 0.0);
  for (const auto& x : X) CHECK(s.predict(x).mean == doctest::Approx(36.0 + 0.3 * oracle::smooth(x)).epsilon(1e-3));
  CHECK_THROWS_AS(s.add({0.1, 0.2}, 1.0), ParameterError);
}
