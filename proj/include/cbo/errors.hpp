#pragma once

#include <stdexcept>
#include <string>

namespace cbo {

/// Raw parameter value outside its declared box.
class BoundsError : public std::out_of_range {
 public:
  BoundsError(std::string dimension, const std::string& what)
      : std::out_of_range(what), dimension_(std::move(dimension)) {}
  const std::string& dimension() const noexcept { return dimension_; }

 private:
  std::string dimension_;
};

/// Invalid argument to a public operation (grid size, tolerance, budget, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Gram matrix could not be factorized even after jitter escalation.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double max_jitter, double condition_estimate)
      : std::runtime_error(what), max_jitter_(max_jitter), condition_estimate_(condition_estimate) {}
  double max_jitter() const noexcept { return max_jitter_; }
  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double max_jitter_;
  double condition_estimate_;
};

/// A speed measurement that cannot be log-transformed.
class MeasurementError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The evaluator (simulator or external process) failed to produce a result.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, std::string captured_output = {})
      : std::runtime_error(what), captured_output_(std::move(captured_output)) {}
  const std::string& captured_output() const noexcept { return captured_output_; }

 private:
  std::string captured_output_;
};

/// Experiment configuration rejected; `field` names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace cbo
