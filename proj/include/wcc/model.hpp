#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

// Cost and time models for Map-Reduce collaborative computing over a set of
// heterogeneous wireless nodes sharing one access point. All quantities are
// SI (bits, seconds, hertz, watts, joules); unit conversion happens at the
// configuration boundary, never inside the formulas.
namespace wcc {

/// Tolerances shared by allocation checks and the dual search.
inline constexpr double kCoverageRelTol = 1e-9;  // on sum(l_k) = L
inline constexpr double kLatencySlackS = 1e-12;  // on per-node latency

/// Global problem constants.
struct SystemConfig {
  std::size_t node_count = 1;   ///< K, number of nodes
  double dataset_bits = 0;      ///< L, size of the shared dataset
  double local_data_bits = 0;   ///< D, per-node local data size
  double intermediate_bits = 0; ///< T, intermediate values per reducer
  double latency_s = 0;         ///< tau, end-to-end latency budget
  double bandwidth_hz = 0;      ///< B, uplink bandwidth per node
  double noise_power_w = 0;     ///< sigma^2, noise power in bandwidth B
  double snr_gap = 1;           ///< Gamma >= 1, modulation SNR gap

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Per-node compute and channel parameters. The uplink channel is kept as
/// the power gain |h|^2; the phase never enters any cost.
struct NodeProfile {
  double cycles_per_bit = 0;     ///< C_k
  double energy_per_cycle_j = 0; ///< P_k
  double clock_hz = 0;           ///< F_k
  double channel_gain = 0;       ///< |h_k|^2

  void validate(std::size_t index) const;
};

/// A fully specified problem: constants plus one profile per node.
struct Instance {
  SystemConfig config;
  std::vector<NodeProfile> nodes;

  void validate() const;
  std::size_t size() const { return nodes.size(); }
};

/// Per-node Map loads and Shuffle transmit durations; the output of any
/// allocation scheme.
struct Allocation {
  std::vector<double> load_bits;      ///< l_k
  std::vector<double> shuffle_time_s; ///< t_k
};

/// Energy totals split by collaboration phase.
struct EnergyBreakdown {
  std::vector<double> map_j;
  std::vector<double> shuffle_j;
  std::vector<double> reduce_j;
  double map_total_j = 0;
  double shuffle_total_j = 0;
  double reduce_total_j = 0;
  double total_j = 0;
};

/// Energy/time cost of one local-computation phase at one node.
struct PhaseCost {
  double energy_j = 0;
  double time_s = 0;
};

/// Shuffle overhead ratio alpha = (K-1) T / L: bits of intermediate values a
/// node uploads per bit of assigned load. Zero iff K = 1.
double shuffle_ratio(const SystemConfig& config);

/// Effective latency tau_k: the budget left for node k's Map and Shuffle
/// after the slowest reducer and the mapping of the K*D local-data bits.
/// May be negative; negative values signal infeasibility downstream.
double effective_latency(const Instance& instance, std::size_t node);

/// All tau_k at once; computes the slowest-reducer term a single time.
std::vector<double> effective_latencies(const Instance& instance);

/// Map phase: energy (K D + l) C P and time (K D + l) C / F.
PhaseCost map_cost(const SystemConfig& config, const NodeProfile& node,
                   double load_bits);

/// Reduce phase: energy T C P and time T C / F, independent of the load.
PhaseCost reduce_cost(const SystemConfig& config, const NodeProfile& node);

/// Received power needed to sustain an uplink rate x: sigma^2 Gamma
/// (2^(x/B) - 1). Strictly increasing and convex, 0 at x = 0; saturates to
/// +inf on overflow.
double power_for_rate(const SystemConfig& config, double rate_bps);

/// Shuffle phase energy (t / |h|^2) f(alpha l / t). Zero when l = 0
/// whatever t is; +inf when l > 0 and t = 0.
double shuffle_energy(const SystemConfig& config, const NodeProfile& node,
                      double load_bits, double shuffle_time_s);

/// Per-node and aggregate Map/Shuffle/Reduce energies of an allocation.
EnergyBreakdown total_energy(const Instance& instance,
                             const Allocation& allocation);

/// One violated allocation constraint, with the amount it is missed by.
struct ConstraintViolation {
  enum class Kind {
    coverage,              // sum(l_k) != L
    negative_load,         // l_k < 0
    negative_shuffle_time, // t_k < 0
    latency,               // l_k C/F + t_k > tau_k
  };
  Kind kind;
  std::optional<std::size_t> node; // empty for system-wide constraints
  double slack;                    // positive: amount of violation
  std::string describe() const;
};

/// Checks coverage, nonnegativity and per-node latency. Empty = feasible.
std::vector<ConstraintViolation> validate_allocation(
    const Instance& instance, const Allocation& allocation);

enum class Scheme { optimal, blind, solo };

const char* scheme_name(Scheme scheme);

/// Largest dataset the given scheme can process within the latency budget.
/// Nodes with negative tau_k contribute zero under the optimal scheme; the
/// result is clamped at zero for all schemes.
double max_load(const Instance& instance, Scheme scheme);

}  // namespace wcc
