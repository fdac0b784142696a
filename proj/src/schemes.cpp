#include "wcc/schemes.hpp"

namespace wcc {

SchemeResult blind_allocation(const Instance& instance) {
  instance.validate();
  SchemeResult result;
  result.scheme = Scheme::blind;

  const std::vector<double> taus = effective_latencies(instance);
  for (double tau_k : taus)
    if (tau_k < 0) return result;
  if (instance.config.dataset_bits > max_load(instance, Scheme::blind))
    return result;

  const std::size_t n = instance.size();
  const double share = instance.config.dataset_bits / static_cast<double>(n);
  Allocation allocation;
  allocation.load_bits.assign(n, share);
  allocation.shuffle_time_s.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const NodeProfile& node = instance.nodes[k];
    allocation.shuffle_time_s[k] =
        taus[k] - share * node.cycles_per_bit / node.clock_hz;
  }

  result.feasible = true;
  result.breakdown = total_energy(instance, allocation);
  result.allocation = std::move(allocation);
  return result;
}

SchemeResult solo_evaluation(const Instance& instance) {
  instance.validate();
  SchemeResult result;
  result.scheme = Scheme::solo;

  const SystemConfig& cfg = instance.config;
  if (cfg.dataset_bits > max_load(instance, Scheme::solo)) return result;

  const std::size_t n = instance.size();
  EnergyBreakdown breakdown;
  breakdown.map_j.resize(n);
  breakdown.shuffle_j.assign(n, 0);
  breakdown.reduce_j.assign(n, 0);
  const double bits = cfg.local_data_bits + cfg.dataset_bits;
  for (std::size_t k = 0; k < n; ++k) {
    const NodeProfile& node = instance.nodes[k];
    breakdown.map_j[k] =
        bits * node.cycles_per_bit * node.energy_per_cycle_j;
    breakdown.map_total_j += breakdown.map_j[k];
  }
  breakdown.total_j = breakdown.map_total_j;

  result.feasible = true;
  result.breakdown = std::move(breakdown);
  return result;
}

}  // namespace wcc
