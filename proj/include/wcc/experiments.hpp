#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wcc/sampling.hpp"

namespace wcc {

/// Rejection sampling could not gather the requested number of feasible
/// instances within the over-draw cap.
class ConditioningError : public std::runtime_error {
 public:
  ConditioningError(const std::string& what, double rate)
      : std::runtime_error(what), feasible_rate(rate) {}
  double feasible_rate;
};

/// Empirical outage probabilities P[L_max < L] at one (K, tau) point,
/// estimated per scheme on shared draws. Half-widths are 95% binomial
/// normal approximations.
struct OutagePoint {
  std::size_t node_count = 0;
  double latency_s = 0;
  double p_optimal = 0, p_blind = 0, p_solo = 0;
  double ci_optimal = 0, ci_blind = 0, ci_solo = 0;
  std::uint64_t draws = 0;
};

OutagePoint estimate_outage(const DistributionSpec& spec,
                            const Workload& workload, std::size_t node_count,
                            double latency_s, std::uint64_t draws,
                            std::uint64_t master_seed, unsigned jobs = 1);

/// Mean per-phase energies over the accepted draws, with 95% normal
/// half-widths of each mean.
struct PhaseMeans {
  double map_j = 0, shuffle_j = 0, reduce_j = 0, total_j = 0;
  double ci_map_j = 0, ci_shuffle_j = 0, ci_reduce_j = 0, ci_total_j = 0;
};

/// One grid point of an energy sweep. `blind` is present only for sweeps
/// that compare schemes. Means cover exactly `draws` accepted instances;
/// `attempts` counts the sampling attempts consumed to find them.
struct SweepRecord {
  double x = 0;  ///< independent variable: node count or latency
  PhaseMeans optimal;
  std::optional<PhaseMeans> blind;
  double feasible_rate = 0;
  std::uint64_t draws = 0;
  std::uint64_t attempts = 0;
};

/// Mean energy versus node count at fixed latency. Draws are conditioned
/// on feasibility for both the optimal and the blind scheme (rejection
/// sampling, 1000x over-draw cap).
std::vector<SweepRecord> sweep_energy_vs_k(
    const DistributionSpec& spec, const Workload& workload, double latency_s,
    const std::vector<std::size_t>& node_grid, std::uint64_t draws,
    std::uint64_t master_seed, unsigned jobs = 1);

/// Mean optimal-scheme energy versus latency at fixed node count. Draws
/// are conditioned on optimal feasibility at the smallest latency of the
/// grid, so every grid point averages the same instances.
std::vector<SweepRecord> sweep_energy_vs_tau(
    const DistributionSpec& spec, const Workload& workload,
    std::size_t node_count, const std::vector<double>& latency_grid,
    std::uint64_t draws, std::uint64_t master_seed, unsigned jobs = 1);

}  // namespace wcc
