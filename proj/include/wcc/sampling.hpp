#pragma once

#include <cstdint>
#include <vector>

#include "wcc/model.hpp"

namespace wcc {

/// The workload shared by every instance of one experiment.
struct Workload {
  double dataset_bits = 0;       ///< L
  double local_data_bits = 0;    ///< D
  double intermediate_bits = 0;  ///< T
};

/// Node-population distributions for Monte-Carlo experiments, plus the
/// channel constants. Defaults reproduce the reference parameter table:
/// C ~ U[500, 1500] cycles/bit, P ~ U[10, 200] pJ/cycle, F uniform over
/// {0.1, ..., 1.0} GHz, |h|^2 exponential with mean 1e-3, B = 15 kHz,
/// sigma^2 = 1 nW, Gamma = 1.
struct DistributionSpec {
  double cycles_per_bit_lo = 500;
  double cycles_per_bit_hi = 1500;
  double energy_per_cycle_lo_j = 10e-12;
  double energy_per_cycle_hi_j = 200e-12;
  std::vector<double> clock_levels_hz = default_clock_levels();
  double channel_gain_mean = 1e-3;
  double bandwidth_hz = 15e3;
  double noise_power_w = 1e-9;
  double snr_gap = 1;

  static std::vector<double> default_clock_levels();
  void validate() const;
};

/// Stable avalanche mix of (master seed, draw index). Every draw gets its
/// own stream, so results do not depend on evaluation order or worker
/// count. The derivation is fixed: splitmix64-finalize both inputs and
/// finalize their xor.
std::uint64_t child_seed(std::uint64_t master_seed, std::uint64_t draw_index);

/// One random instance: a pure function of (master_seed, draw_index).
/// Per node the stream yields, in order, cycles/bit, energy/cycle, the
/// clock level and the channel gain.
Instance sample_instance(const DistributionSpec& spec,
                         const Workload& workload, std::size_t node_count,
                         double latency_s, std::uint64_t master_seed,
                         std::uint64_t draw_index);

}  // namespace wcc
