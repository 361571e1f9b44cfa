#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cbo/gp.hpp"

namespace cbo {

/// How a Surrogate turns its data into a fitted GP.
struct ModelPolicy {
  bool standardize = true;
  bool optimize = true;
  /// Starting point (and the fixed value when optimize is false). Empty lengthscales
  /// are filled with `default_lengthscale` for every dimension.
  GPHyperparams initial{1.0, {}, 1e-3};
  double default_lengthscale = 0.3;
  HyperparamSearch search{};
  /// Hyperparameters are re-optimized on every refit while the data set has at most
  /// this many points; beyond it, every ceil(n / this) refits. Factorization is
  /// always redone from scratch.
  std::size_t optimize_every_refit_up_to = 60;
};

/// GP over raw targets: standardizes, fits hyperparameters, refits from scratch.
class Surrogate {
 public:
  explicit Surrogate(std::size_t dim, ModelPolicy policy = {});

  void add(UnitPoint x, double y);
  /// Rebuild the posterior over all data added so far; `seed` drives hyperparameter restarts.
  void refit(std::uint64_t seed);

  /// Latent posterior in the original target units.
  PosteriorPrediction predict(std::span<const double> x) const;

  std::size_t size() const noexcept { return inputs_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<UnitPoint>& inputs() const noexcept { return inputs_; }
  const std::vector<double>& targets() const noexcept { return targets_; }
  /// Hyperparameters in standardized target units.
  const GPHyperparams& hyperparams() const noexcept { return gp_.hyperparams(); }
  const GaussianProcess& gp() const noexcept { return gp_; }
  double offset() const noexcept { return offset_; }
  double scale() const noexcept { return scale_; }
  bool last_fit_warning() const noexcept { return warning_; }

 private:
  std::size_t dim_;
  ModelPolicy policy_;
  std::vector<UnitPoint> inputs_;
  std::vector<double> targets_;
  GaussianProcess gp_;
  double offset_ = 0.0;
  double scale_ = 1.0;
  std::size_t refits_since_optimize_ = 0;
  bool warning_ = false;
};

}  // namespace cbo
