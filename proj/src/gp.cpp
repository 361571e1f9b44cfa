#include "cbo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include "cbo/errors.hpp"

namespace cbo {
namespace {

constexpr double kSqrt5 = 2.23606797749978969640917366873128;

void check_dims(const GPHyperparams& hp, std::size_t dim) {
  if (hp.lengthscales.size() != dim)
    throw ParameterError("hyperparameters have " + std::to_string(hp.lengthscales.size()) +
                         " lengthscales for " + std::to_string(dim) + "-D inputs");
  const bool ls_ok = std::all_of(hp.lengthscales.begin(), hp.lengthscales.end(),
                                 [](double l) { return std::isfinite(l) && l > 0.0; });
  if (!(std::isfinite(hp.amplitude) && hp.amplitude > 0.0) || !ls_ok ||
      !(std::isfinite(hp.noise_variance) && hp.noise_variance >= 0.0))
    throw ParameterError("hyperparameters must be finite with positive amplitude and lengthscales, noise >= 0");
}

Eigen::MatrixXd to_matrix(const std::vector<UnitPoint>& X, std::size_t dim) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(X.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (X[i].size() != dim) throw ParameterError("training inputs have inconsistent dimension");
    for (std::size_t d = 0; d < dim; ++d) m(Eigen::Index(i), Eigen::Index(d)) = X[i][d];
  }
  return m;
}

double scaled_distance(const GPHyperparams& hp, const double* a, const double* b, std::size_t dim) {
  double r2 = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    const double z = (a[d] - b[d]) / hp.lengthscales[d];
    r2 += z * z;
  }
  return std::sqrt(r2);
}

double matern52(double amplitude, double r) {
  const double sr = kSqrt5 * r;
  return amplitude * (1.0 + sr + sr * sr / 3.0) * std::exp(-sr);
}

Eigen::MatrixXd signal_gram(const GPHyperparams& hp, const Eigen::MatrixXd& X) {
  const Eigen::Index n = X.rows();
  const std::size_t dim = static_cast<std::size_t>(X.cols());
  // Row-major copy so each point's coordinates are contiguous.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> P = X;
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = hp.amplitude;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double k = matern52(hp.amplitude, scaled_distance(hp, P.row(i).data(), P.row(j).data(), dim));
      K(i, j) = k;
      K(j, i) = k;
    }
  }
  return K;
}

struct Factorization {
  Eigen::MatrixXd lower;
  double jitter = 0.0;
};

Factorization factorize(const Eigen::MatrixXd& K, double noise) {
  const Eigen::Index n = K.rows();
  double jitter = 0.0;
  while (true) {
    Eigen::MatrixXd A = K;
    A.diagonal().array() += noise + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() == Eigen::Success) {
      Eigen::MatrixXd L = llt.matrixL();
      const auto diag = L.diagonal();
      if (diag.allFinite() && (n == 0 || diag.minCoeff() > 0.0)) return {std::move(L), jitter};
    }
    if (jitter >= kJitterMax * (1.0 - 1e-9)) {
      const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A, Eigen::EigenvaluesOnly).eigenvalues();
      const double cond = eig.size() > 0 && eig.minCoeff() > 0.0 ? eig.maxCoeff() / eig.minCoeff()
                                                                 : std::numeric_limits<double>::infinity();
      throw NumericalError("Gram matrix not positive definite (n=" + std::to_string(n) + ", noise=" +
                               std::to_string(noise) + ", jitter up to " + std::to_string(jitter) +
                               ", condition estimate " + std::to_string(cond) + ")",
                           jitter, cond);
    }
    jitter = jitter == 0.0 ? kJitterStart : jitter * 10.0;
  }
}

double lml_from_factor(const Eigen::MatrixXd& L, const Eigen::VectorXd& y, const Eigen::VectorXd& weights) {
  const double n = static_cast<double>(y.size());
  return -0.5 * y.dot(weights) - L.diagonal().array().log().sum() - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

Eigen::VectorXd to_vector(std::span<const double> y) {
  return Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
}

}  // namespace

double kernel_eval(const GPHyperparams& hp, std::span<const double> x, std::span<const double> x2) {
  if (x.size() != x2.size() || x.size() != hp.lengthscales.size())
    throw ParameterError("kernel_eval: dimension mismatch");
  return matern52(hp.amplitude, scaled_distance(hp, x.data(), x2.data(), x.size()));
}

GaussianProcess::GaussianProcess(GPHyperparams hp, std::size_t dim)
    : hp_(std::move(hp)), dim_(dim), inputs_(0, Eigen::Index(dim)) {
  check_dims(hp_, dim_);
}

GaussianProcess GaussianProcess::fit(GPHyperparams hp, const std::vector<UnitPoint>& X, std::span<const double> y) {
  if (X.empty()) throw ParameterError("fit needs at least one observation");
  if (X.size() != y.size()) throw ParameterError("fit: inputs and targets differ in length");
  GaussianProcess gp(std::move(hp), X.front().size());
  gp.inputs_ = to_matrix(X, gp.dim_);
  const Eigen::VectorXd targets = to_vector(y);
  auto fac = factorize(signal_gram(gp.hp_, gp.inputs_), gp.hp_.noise_variance);
  gp.chol_ = std::move(fac.lower);
  gp.jitter_ = fac.jitter;
  gp.weights_ = gp.chol_.triangularView<Eigen::Lower>().solve(targets);
  gp.chol_.triangularView<Eigen::Lower>().adjoint().solveInPlace(gp.weights_);
  gp.lml_ = lml_from_factor(gp.chol_, targets, gp.weights_);
  return gp;
}

PosteriorPrediction GaussianProcess::predict(std::span<const double> x) const {
  if (x.size() != dim_) throw ParameterError("predict: dimension mismatch");
  const Eigen::Index n = inputs_.rows();
  if (n == 0) return {0.0, hp_.amplitude};
  Eigen::VectorXd kstar(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double r2 = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) {
      const double z = (inputs_(i, Eigen::Index(d)) - x[d]) / hp_.lengthscales[d];
      r2 += z * z;
    }
    kstar(i) = matern52(hp_.amplitude, std::sqrt(r2));
  }
  const double mean = kstar.dot(weights_);
  const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(kstar);
  return {mean, std::max(0.0, hp_.amplitude - v.squaredNorm())};
}

PosteriorPrediction GaussianProcess::predict_observed(std::span<const double> x) const {
  auto p = predict(x);
  p.variance += hp_.noise_variance;
  return p;
}

double log_marginal_likelihood(const GPHyperparams& hp, const std::vector<UnitPoint>& X, std::span<const double> y) {
  return GaussianProcess::fit(hp, X, y).log_marginal_likelihood();
}

LmlResult log_marginal_likelihood_with_gradient(const GPHyperparams& hp, const std::vector<UnitPoint>& X,
                                                std::span<const double> y) {
  if (X.empty() || X.size() != y.size()) throw ParameterError("LML needs matching, non-empty inputs and targets");
  const std::size_t dim = X.front().size();
  check_dims(hp, dim);
  const Eigen::MatrixXd inputs = to_matrix(X, dim);
  const Eigen::VectorXd targets = to_vector(y);
  const Eigen::MatrixXd K = signal_gram(hp, inputs);
  const auto fac = factorize(K, hp.noise_variance);
  const auto L = fac.lower.triangularView<Eigen::Lower>();
  Eigen::VectorXd alpha = L.solve(targets);
  L.adjoint().solveInPlace(alpha);

  LmlResult out;
  out.value = lml_from_factor(fac.lower, targets, alpha);

  const Eigen::Index n = inputs.rows();
  Eigen::MatrixXd inverse = L.solve(Eigen::MatrixXd::Identity(n, n));
  L.adjoint().solveInPlace(inverse);
  const Eigen::MatrixXd A = alpha * alpha.transpose() - inverse;

  out.gradient.assign(dim + 2, 0.0);
  out.gradient[0] = 0.5 * (A.array() * K.array()).sum();
  out.gradient[dim + 1] = 0.5 * hp.noise_variance * A.trace();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      double r2 = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double z = (inputs(i, Eigen::Index(d)) - inputs(j, Eigen::Index(d))) / hp.lengthscales[d];
        r2 += z * z;
      }
      const double sr = kSqrt5 * std::sqrt(r2);
      // d k / d log l_d = amplitude (5/3) (1 + sqrt5 r) exp(-sqrt5 r) (dx_d / l_d)^2
      const double common = A(i, j) * hp.amplitude * (5.0 / 3.0) * (1.0 + sr) * std::exp(-sr);
      for (std::size_t d = 0; d < dim; ++d) {
        const double z = (inputs(i, Eigen::Index(d)) - inputs(j, Eigen::Index(d))) / hp.lengthscales[d];
        out.gradient[d + 1] += common * z * z;  // 0.5 * 2 for the symmetric pair
      }
    }
  }
  return out;
}

HyperparamBounds HyperparamBounds::for_targets(std::span<const double> y) {
  double var = 0.0;
  if (y.size() > 1) {
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= double(y.size());
    for (double v : y) var += (v - mean) * (v - mean);
    var /= double(y.size() - 1);
  }
  if (!(var > 1e-12)) var = 1.0;
  HyperparamBounds b;
  b.amplitude = {1e-4 * var, 1e2 * var};
  b.noise = {1e-8, var};
  return b;
}

GPHyperparams HyperparamBounds::clamp(GPHyperparams hp) const {
  hp.amplitude = std::clamp(hp.amplitude, amplitude.lower, amplitude.upper);
  for (auto& l : hp.lengthscales) l = std::clamp(l, lengthscale.lower, lengthscale.upper);
  hp.noise_variance = std::clamp(hp.noise_variance, noise.lower, noise.upper);
  return hp;
}

bool HyperparamBounds::contains(const GPHyperparams& hp) const {
  auto in = [](double v, Interval i) { return v >= i.lower && v <= i.upper; };
  return in(hp.amplitude, amplitude) && in(hp.noise_variance, noise) &&
         std::all_of(hp.lengthscales.begin(), hp.lengthscales.end(), [&](double l) { return in(l, lengthscale); });
}

namespace {

using LogParams = std::vector<double>;

GPHyperparams from_log(const LogParams& p) {
  GPHyperparams hp;
  hp.amplitude = std::exp(p.front());
  for (std::size_t i = 1; i + 1 < p.size(); ++i) hp.lengthscales.push_back(std::exp(p[i]));
  hp.noise_variance = std::exp(p.back());
  return hp;
}

LogParams to_log(const GPHyperparams& hp) {
  LogParams p{std::log(hp.amplitude)};
  for (double l : hp.lengthscales) p.push_back(std::log(l));
  p.push_back(std::log(hp.noise_variance));
  return p;
}

class LogBox {
 public:
  LogBox(const HyperparamBounds& b, std::size_t dim) {
    lo_.push_back(std::log(b.amplitude.lower));
    hi_.push_back(std::log(b.amplitude.upper));
    for (std::size_t d = 0; d < dim; ++d) {
      lo_.push_back(std::log(b.lengthscale.lower));
      hi_.push_back(std::log(b.lengthscale.upper));
    }
    lo_.push_back(std::log(b.noise.lower));
    hi_.push_back(std::log(b.noise.upper));
  }
  LogParams project(LogParams p) const {
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::clamp(p[i], lo_[i], hi_[i]);
    return p;
  }
  // Bounds exactly as declared (log/exp round trips can overshoot by an ulp).
  GPHyperparams to_hyperparams(const LogParams& p, const HyperparamBounds& b) const { return b.clamp(from_log(project(p))); }

 private:
  LogParams lo_, hi_;
};

struct Evaluated {
  LogParams point;
  double value;
  std::vector<double> gradient;
};

std::optional<Evaluated> evaluate(const LogBox& box, const HyperparamBounds& bounds, const LogParams& p,
                                  const std::vector<UnitPoint>& X, std::span<const double> y) {
  try {
    auto r = log_marginal_likelihood_with_gradient(box.to_hyperparams(p, bounds), X, y);
    if (!std::isfinite(r.value)) return std::nullopt;
    for (double g : r.gradient)
      if (!std::isfinite(g)) return std::nullopt;
    return Evaluated{p, r.value, std::move(r.gradient)};
  } catch (const NumericalError&) {
    return std::nullopt;
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::optional<Evaluated> ascend(const LogBox& box, const HyperparamBounds& bounds, LogParams start,
                                const std::vector<UnitPoint>& X, std::span<const double> y,
                                const HyperparamSearch& search) {
  auto current = evaluate(box, bounds, box.project(std::move(start)), X, y);
  if (!current) return std::nullopt;
  double step = 0.1;
  for (int it = 0; it < search.max_iterations; ++it) {
    std::optional<Evaluated> next;
    for (int halvings = 0; halvings < 30; ++halvings) {
      LogParams trial = current->point;
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] += step * current->gradient[i];
      trial = box.project(std::move(trial));
      std::vector<double> moved(trial.size());
      for (std::size_t i = 0; i < trial.size(); ++i) moved[i] = trial[i] - current->point[i];
      const double predicted = dot(current->gradient, moved);
      if (predicted <= 0.0) return current;  // projected gradient vanishes
      auto cand = evaluate(box, bounds, trial, X, y);
      if (cand && cand->value >= current->value + 1e-4 * predicted) {
        next = std::move(cand);
        break;
      }
      step *= 0.5;
    }
    if (!next) return current;
    std::vector<double> s(next->point.size()), g(next->point.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = next->point[i] - current->point[i];
      g[i] = next->gradient[i] - current->gradient[i];
    }
    const double gain = next->value - current->value;
    current = std::move(next);
    if (gain < search.tolerance * (1.0 + std::abs(current->value))) break;
    // Barzilai-Borwein step for ascent; fall back to growing the step when curvature is not negative.
    const double sy = dot(s, g);
    step = sy < 0.0 ? std::clamp(-dot(s, s) / sy, 1e-6, 1e3) : std::min(step * 2.0, 1e3);
  }
  return current;
}

}  // namespace

HyperparamFit optimize_hyperparams(const std::vector<UnitPoint>& X, std::span<const double> y,
                                   const GPHyperparams& init, const HyperparamBounds& bounds,
                                   const HyperparamSearch& search) {
  if (X.size() < 2) throw ParameterError("hyperparameter optimization needs at least 2 observations");
  const std::size_t dim = X.front().size();
  check_dims(init, dim);
  const LogBox box(bounds, dim);
  const GPHyperparams start = bounds.clamp(init);

  std::vector<LogParams> starts{to_log(start)};
  std::mt19937_64 rng(search.seed);
  auto log_uniform = [&](double lo, double hi, Interval limit) {
    lo = std::max(lo, limit.lower);
    hi = std::min(hi, limit.upper);
    if (hi <= lo) return std::log(limit.lower);
    return std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng);
  };
  for (int r = 0; r < search.random_restarts; ++r) {
    LogParams p{log_uniform(0.1, 10.0 * bounds.amplitude.lower / 1e-4, bounds.amplitude)};
    for (std::size_t d = 0; d < dim; ++d) p.push_back(log_uniform(0.05, 2.0, bounds.lengthscale));
    p.push_back(log_uniform(1e-6, 0.1 * bounds.noise.upper, bounds.noise));
    starts.push_back(std::move(p));
  }

  std::optional<Evaluated> best;
  for (const auto& s : starts) {
    auto result = ascend(box, bounds, s, X, y, search);
    if (result && (!best || result->value > best->value)) best = std::move(result);
  }
  if (!best) return {start, -std::numeric_limits<double>::infinity(), true};
  return {box.to_hyperparams(best->point, bounds), best->value, false};
}

}  // namespace cbo
