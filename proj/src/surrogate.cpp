#include "cbo/surrogate.hpp"

#include <cmath>

#include "cbo/errors.hpp"

namespace cbo {
namespace {

GPHyperparams initial_hyperparams(const ModelPolicy& policy, std::size_t dim) {
  GPHyperparams hp = policy.initial;
  if (hp.lengthscales.empty()) hp.lengthscales.assign(dim, policy.default_lengthscale);
  return hp;
}

}  // namespace

Surrogate::Surrogate(std::size_t dim, ModelPolicy policy)
    : dim_(dim), policy_(std::move(policy)), gp_(initial_hyperparams(policy_, dim), dim) {}

void Surrogate::add(UnitPoint x, double y) {
  if (x.size() != dim_) throw ParameterError("surrogate input has wrong dimension");
  if (!std::isfinite(y)) throw ParameterError("surrogate target must be finite");
  inputs_.push_back(std::move(x));
  targets_.push_back(y);
}

void Surrogate::refit(std::uint64_t seed) {
  if (inputs_.empty()) return;
  const std::size_t n = targets_.size();
  offset_ = 0.0;
  scale_ = 1.0;
  if (policy_.standardize) {
    for (double v : targets_) offset_ += v;
    offset_ /= double(n);
    if (n > 1) {
      double var = 0.0;
      for (double v : targets_) var += (v - offset_) * (v - offset_);
      var /= double(n - 1);
      if (var > 1e-24) scale_ = std::sqrt(var);
    }
  }
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = (targets_[i] - offset_) / scale_;

  GPHyperparams hp = gp_.size() > 0 ? gp_.hyperparams() : initial_hyperparams(policy_, dim_);
  warning_ = false;
  const std::size_t period =
      n <= policy_.optimize_every_refit_up_to
          ? 1
          : (n + policy_.optimize_every_refit_up_to - 1) / policy_.optimize_every_refit_up_to;
  if (policy_.optimize && n >= 2 && ++refits_since_optimize_ >= period) {
    refits_since_optimize_ = 0;
    HyperparamSearch search = policy_.search;
    search.seed ^= seed;
    const auto bounds = HyperparamBounds::for_targets(z);
    const auto fit = optimize_hyperparams(inputs_, z, hp, bounds, search);
    hp = fit.hyperparams;
    warning_ = fit.warning;
  }
  gp_ = GaussianProcess::fit(hp, inputs_, z);
}

PosteriorPrediction Surrogate::predict(std::span<const double> x) const {
  auto p = gp_.predict(x);
  return {offset_ + scale_ * p.mean, scale_ * scale_ * p.variance};
}

}  // namespace cbo
