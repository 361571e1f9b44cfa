#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "cbo/constraint_model.hpp"
#include "cbo/evaluator.hpp"
#include "cbo/optimizer.hpp"
#include "cbo/search_space.hpp"

namespace cbo {

struct BaselineResult {
  History history;
  std::optional<RawPoint> best;  // highest measured objective with measured speed > threshold
  std::optional<double> best_objective;
  std::optional<double> best_speed_wpm;
};

/// Called after every baseline evaluation with the best feasible observation so far.
using BaselineCallback = std::function<void(const Observation&, const BaselineResult& so_far)>;

/// Evaluates every point of the m^D grid (task Both), in grid order.
BaselineResult grid_search(const SearchSpace& space, Evaluator& evaluator, const ConstraintSpec& constraint,
                           int values_per_dim, std::uint64_t seed = 0, const BaselineCallback& callback = {});

/// `budget` uniform samples in unit space, evaluated with task Both.
BaselineResult random_search(const SearchSpace& space, Evaluator& evaluator, const ConstraintSpec& constraint,
                             int budget, std::uint64_t seed, const BaselineCallback& callback = {});

}  // namespace cbo
