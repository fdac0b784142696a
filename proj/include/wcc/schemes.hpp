#pragma once

#include <optional>

#include "wcc/model.hpp"

namespace wcc {

/// Outcome of evaluating one allocation scheme on an instance.
/// Infeasibility is a result, not an error: `feasible` is false and the
/// breakdown is absent. The solo scenario has no allocation (every node
/// processes the whole dataset by itself).
struct SchemeResult {
  Scheme scheme = Scheme::blind;
  bool feasible = false;
  std::optional<Allocation> allocation;
  std::optional<EnergyBreakdown> breakdown;
};

/// Uniform split l_k = L/K, ignoring heterogeneity. Each node spends all
/// of its remaining effective latency on the shuffle, which is the
/// energy-optimal choice once the loads are fixed.
SchemeResult blind_allocation(const Instance& instance);

/// Non-collaborative scenario: each node maps its local data plus the full
/// dataset on its own, with no shuffle and no separate reduce step.
SchemeResult solo_evaluation(const Instance& instance);

}  // namespace wcc
