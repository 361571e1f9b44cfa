#include "cbo/search_space.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cbo/errors.hpp"

namespace cbo {

SearchSpace::SearchSpace(std::vector<ParamSpec> params) : params_(std::move(params)) {
  if (params_.empty()) throw ParameterError("search space needs at least one parameter");
  std::set<std::string> names;
  for (const auto& p : params_) {
    if (p.name.empty()) throw ParameterError("parameter name must not be empty");
    if (!names.insert(p.name).second) throw ParameterError("duplicate parameter name '" + p.name + "'");
    if (p.lower >= p.upper) throw ParameterError("parameter '" + p.name + "' needs lower < upper");
    if (p.scale == Scale::Log && p.lower < 1)
      throw ParameterError("log-scaled parameter '" + p.name + "' needs lower >= 1");
  }
}

SearchSpace SearchSpace::decoder_default() {
  return SearchSpace({{"d", 0, 10, Scale::Linear}, {"s", 1, 500, Scale::Log}, {"n", 1, 100, Scale::Log}});
}

bool SearchSpace::contains(std::span<const int> raw) const {
  if (raw.size() != params_.size()) return false;
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (raw[i] < params_[i].lower || raw[i] > params_[i].upper) return false;
  return true;
}

double SearchSpace::warp(std::size_t i, double raw) const {
  const auto& p = params_[i];
  if (p.scale == Scale::Linear) return (raw - p.lower) / double(p.upper - p.lower);
  const double lo = std::log(double(p.lower));
  return (std::log(raw) - lo) / (std::log(double(p.upper)) - lo);
}

double SearchSpace::unwarp(std::size_t i, double unit) const {
  const auto& p = params_[i];
  if (p.scale == Scale::Linear) return p.lower + unit * (p.upper - p.lower);
  const double lo = std::log(double(p.lower));
  return std::exp(lo + unit * (std::log(double(p.upper)) - lo));
}

UnitPoint SearchSpace::to_unit(std::span<const int> raw) const {
  if (raw.size() != params_.size())
    throw ParameterError("expected " + std::to_string(params_.size()) + " raw values, got " +
                         std::to_string(raw.size()));
  UnitPoint unit(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto& p = params_[i];
    if (raw[i] < p.lower || raw[i] > p.upper)
      throw BoundsError(p.name, "parameter '" + p.name + "' = " + std::to_string(raw[i]) + " outside [" +
                                    std::to_string(p.lower) + ", " + std::to_string(p.upper) + "]");
    unit[i] = warp(i, raw[i]);
  }
  return unit;
}

RawPoint SearchSpace::from_unit(std::span<const double> unit) const {
  if (unit.size() != params_.size())
    throw ParameterError("expected " + std::to_string(params_.size()) + " unit values, got " +
                         std::to_string(unit.size()));
  RawPoint raw(unit.size());
  for (std::size_t i = 0; i < unit.size(); ++i) {
    const auto& p = params_[i];
    const double u = std::clamp(std::isnan(unit[i]) ? 0.0 : unit[i], 0.0, 1.0);
    const double v = unwarp(i, u);
    // exp(log(x)) can land an ulp below an exact integer; absorb that before flooring.
    const double floored = std::floor(v + 1e-9 * std::max(1.0, std::abs(v)));
    raw[i] = static_cast<int>(std::clamp(floored, double(p.lower), double(p.upper)));
  }
  return raw;
}

UnitPoint SearchSpace::snap(std::span<const double> unit) const { return to_unit(from_unit(unit)); }

std::vector<RawPoint> SearchSpace::grid_values(int values_per_dim) const {
  if (values_per_dim < 2) throw ParameterError("grid needs at least 2 values per dimension");
  const std::size_t m = static_cast<std::size_t>(values_per_dim);
  std::vector<std::vector<int>> axes(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) {
    UnitPoint u(params_.size(), 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      u[i] = double(k) / double(m - 1);
      axes[i].push_back(from_unit(u)[i]);
    }
  }
  std::size_t total = 1;
  for (std::size_t i = 0; i < params_.size(); ++i) total *= m;
  std::vector<RawPoint> points;
  points.reserve(total);
  std::vector<std::size_t> idx(params_.size(), 0);
  for (std::size_t c = 0; c < total; ++c) {
    RawPoint p(params_.size());
    for (std::size_t i = 0; i < params_.size(); ++i) p[i] = axes[i][idx[i]];
    points.push_back(std::move(p));
    for (std::size_t i = params_.size(); i-- > 0;) {
      if (++idx[i] < m) break;
      idx[i] = 0;
    }
  }
  return points;
}

UnitPoint SearchSpace::sample_unit(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  UnitPoint u(params_.size());
  for (auto& v : u) v = uniform(rng);
  return u;
}

RawPoint SearchSpace::sample_uniform(std::mt19937_64& rng) const { return from_unit(sample_unit(rng)); }

RawPoint SearchSpace::sample_uniform(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  return sample_uniform(rng);
}

}  // namespace cbo
