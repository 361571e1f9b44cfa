#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace cbo {

/// Integer parameter values in their native units, one per dimension.
using RawPoint = std::vector<int>;
/// Warped coordinates in [0,1]^D; the representation every model works in.
using UnitPoint = std::vector<double>;

enum class Scale { Linear, Log };

struct ParamSpec {
  std::string name;
  int lower = 0;
  int upper = 1;
  Scale scale = Scale::Linear;
};

/// Box-bounded integer search space with per-dimension linear or log warping.
///
/// Raw -> unit is the exact warp; unit -> raw unwarps, floors and clamps, so
/// every unit point maps to a valid integer configuration.
class SearchSpace {
 public:
  explicit SearchSpace(std::vector<ParamSpec> params);

  /// d in [0,10] linear, s in [1,500] log, n in [1,100] log.
  static SearchSpace decoder_default();

  std::size_t dim() const noexcept { return params_.size(); }
  const std::vector<ParamSpec>& params() const noexcept { return params_; }
  const ParamSpec& operator[](std::size_t i) const { return params_[i]; }

  bool contains(std::span<const int> raw) const;

  /// Throws BoundsError naming the first out-of-range dimension.
  UnitPoint to_unit(std::span<const int> raw) const;
  /// Total: inputs outside [0,1] are clamped first.
  RawPoint from_unit(std::span<const double> unit) const;
  /// to_unit(from_unit(u)): the unit image of the configuration u evaluates to.
  UnitPoint snap(std::span<const double> unit) const;

  /// All m^D points, m evenly spaced unit values per dimension, row-major
  /// with the last dimension varying fastest. Duplicates after flooring stay.
  std::vector<RawPoint> grid_values(int values_per_dim) const;

  RawPoint sample_uniform(std::uint64_t seed) const;
  RawPoint sample_uniform(std::mt19937_64& rng) const;
  UnitPoint sample_unit(std::mt19937_64& rng) const;

 private:
  double warp(std::size_t i, double raw) const;
  double unwarp(std::size_t i, double unit) const;

  std::vector<ParamSpec> params_;
};

}  // namespace cbo
