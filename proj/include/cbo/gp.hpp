#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cbo/search_space.hpp"

namespace cbo {

struct GPHyperparams {
  double amplitude = 1.0;            // signal variance
  std::vector<double> lengthscales;  // one per dimension, unit-cube units
  double noise_variance = 1e-6;

  static GPHyperparams isotropic(std::size_t dim, double amplitude, double lengthscale, double noise_variance) {
    return {amplitude, std::vector<double>(dim, lengthscale), noise_variance};
  }
};

struct PosteriorPrediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Matérn-5/2 covariance between two unit points.
double kernel_eval(const GPHyperparams& hp, std::span<const double> x, std::span<const double> x2);

/// Jitter schedule for the Cholesky factorization: none, then 1e-8 growing x10 up to 1e-4.
inline constexpr double kJitterStart = 1e-8;
inline constexpr double kJitterMax = 1e-4;

/// Zero-mean GP regression with Matérn-5/2 kernel and Gaussian noise.
///
/// Immutable once fitted; prediction is const and safe to call concurrently.
class GaussianProcess {
 public:
  /// Prior-only model (no data).
  GaussianProcess(GPHyperparams hp, std::size_t dim);

  /// Throws NumericalError if K + noise + max jitter is still not positive definite.
  static GaussianProcess fit(GPHyperparams hp, const std::vector<UnitPoint>& X, std::span<const double> y);

  /// Latent posterior: variance excludes observation noise.
  PosteriorPrediction predict(std::span<const double> x) const;
  /// Predictive distribution of a new noisy observation at x.
  PosteriorPrediction predict_observed(std::span<const double> x) const;

  double log_marginal_likelihood() const noexcept { return lml_; }
  const GPHyperparams& hyperparams() const noexcept { return hp_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(inputs_.rows()); }
  std::size_t dim() const noexcept { return dim_; }
  double jitter() const noexcept { return jitter_; }

 private:
  GPHyperparams hp_;
  std::size_t dim_;
  Eigen::MatrixXd inputs_;  // n x D
  Eigen::MatrixXd chol_;    // lower factor of K + (noise + jitter) I
  Eigen::VectorXd weights_;
  double jitter_ = 0.0;
  double lml_ = 0.0;
};

/// Gradient entries are with respect to [log amplitude, log lengthscale_1..D, log noise].
struct LmlResult {
  double value = 0.0;
  std::vector<double> gradient;
};

double log_marginal_likelihood(const GPHyperparams& hp, const std::vector<UnitPoint>& X, std::span<const double> y);
LmlResult log_marginal_likelihood_with_gradient(const GPHyperparams& hp, const std::vector<UnitPoint>& X,
                                                std::span<const double> y);

struct Interval {
  double lower;
  double upper;
};

struct HyperparamBounds {
  Interval amplitude{1e-4, 1e2};
  Interval lengthscale{0.01, 10.0};
  Interval noise{1e-8, 1.0};

  /// Amplitude in [1e-4, 1e2] var(y), noise in [1e-8, var(y)]; var(y) = 0 is treated as 1.
  static HyperparamBounds for_targets(std::span<const double> y);
  GPHyperparams clamp(GPHyperparams hp) const;
  bool contains(const GPHyperparams& hp) const;
};

struct HyperparamSearch {
  int random_restarts = 2;
  int max_iterations = 60;
  double tolerance = 1e-7;
  std::uint64_t seed = 0;
};

struct HyperparamFit {
  GPHyperparams hyperparams;
  double lml = 0.0;
  bool warning = false;  // every start failed numerically; hyperparams == clamped init
};

/// Multi-start projected gradient ascent of the LML in log-hyperparameter space.
/// The clamped init is always one of the starts, so the result never scores below it.
HyperparamFit optimize_hyperparams(const std::vector<UnitPoint>& X, std::span<const double> y,
                                   const GPHyperparams& init, const HyperparamBounds& bounds,
                                   const HyperparamSearch& search = {});

}  // namespace cbo
