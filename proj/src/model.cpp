#include "wcc/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace wcc {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

bool positive_finite(double v) { return v > 0 && std::isfinite(v); }

}  // namespace

void SystemConfig::validate() const {
  require(node_count >= 1, "node_count must be >= 1");
  require(positive_finite(dataset_bits), "dataset_bits must be positive");
  require(local_data_bits >= 0 && std::isfinite(local_data_bits),
          "local_data_bits must be non-negative");
  require(positive_finite(intermediate_bits),
          "intermediate_bits must be positive");
  require(positive_finite(latency_s), "latency_s must be positive");
  require(positive_finite(bandwidth_hz), "bandwidth_hz must be positive");
  require(positive_finite(noise_power_w), "noise_power_w must be positive");
  require(snr_gap >= 1 && std::isfinite(snr_gap), "snr_gap must be >= 1");
}

void NodeProfile::validate(std::size_t index) const {
  auto field = [index](const char* name) {
    std::ostringstream os;
    os << name << " must be positive at node " << index + 1;
    return os.str();
  };
  require(positive_finite(cycles_per_bit), field("cycles_per_bit"));
  require(positive_finite(energy_per_cycle_j), field("energy_per_cycle_j"));
  require(positive_finite(clock_hz), field("clock_hz"));
  require(positive_finite(channel_gain), field("channel_gain"));
}

void Instance::validate() const {
  config.validate();
  require(nodes.size() == config.node_count,
          "node list length must equal node_count");
  for (std::size_t k = 0; k < nodes.size(); ++k) nodes[k].validate(k);
}

double shuffle_ratio(const SystemConfig& config) {
  return static_cast<double>(config.node_count - 1) *
         config.intermediate_bits / config.dataset_bits;
}

namespace {

double slowest_reduce_s(const Instance& instance) {
  double worst = 0;
  for (const NodeProfile& node : instance.nodes)
    worst = std::max(worst, node.cycles_per_bit / node.clock_hz);
  return instance.config.intermediate_bits * worst;
}

double effective_latency_with(const Instance& instance, std::size_t node,
                              double slowest_reduce) {
  const NodeProfile& profile = instance.nodes.at(node);
  const double map_local = static_cast<double>(instance.config.node_count) *
                           instance.config.local_data_bits *
                           profile.cycles_per_bit / profile.clock_hz;
  return instance.config.latency_s - slowest_reduce - map_local;
}

}  // namespace

double effective_latency(const Instance& instance, std::size_t node) {
  return effective_latency_with(instance, node, slowest_reduce_s(instance));
}

std::vector<double> effective_latencies(const Instance& instance) {
  const double slowest = slowest_reduce_s(instance);
  std::vector<double> taus(instance.size());
  for (std::size_t k = 0; k < taus.size(); ++k)
    taus[k] = effective_latency_with(instance, k, slowest);
  return taus;
}

PhaseCost map_cost(const SystemConfig& config, const NodeProfile& node,
                   double load_bits) {
  const double bits = static_cast<double>(config.node_count) *
                          config.local_data_bits +
                      load_bits;
  return {bits * node.cycles_per_bit * node.energy_per_cycle_j,
          bits * node.cycles_per_bit / node.clock_hz};
}

PhaseCost reduce_cost(const SystemConfig& config, const NodeProfile& node) {
  return {config.intermediate_bits * node.cycles_per_bit *
              node.energy_per_cycle_j,
          config.intermediate_bits * node.cycles_per_bit / node.clock_hz};
}

double power_for_rate(const SystemConfig& config, double rate_bps) {
  // expm1 keeps f exact at 0 and accurate for small rates; overflow lands
  // on +inf rather than wrapping.
  return config.noise_power_w * config.snr_gap *
         std::expm1(rate_bps / config.bandwidth_hz * M_LN2);
}

double shuffle_energy(const SystemConfig& config, const NodeProfile& node,
                      double load_bits, double shuffle_time_s) {
  const double bits = shuffle_ratio(config) * load_bits;
  if (bits == 0) return 0;  // nothing to transmit, any duration
  if (shuffle_time_s <= 0) return std::numeric_limits<double>::infinity();
  return shuffle_time_s / node.channel_gain *
         power_for_rate(config, bits / shuffle_time_s);
}

EnergyBreakdown total_energy(const Instance& instance,
                             const Allocation& allocation) {
  const std::size_t n = instance.size();
  if (allocation.load_bits.size() != n || allocation.shuffle_time_s.size() != n)
    throw std::invalid_argument("allocation does not match instance size");

  EnergyBreakdown out;
  out.map_j.resize(n);
  out.shuffle_j.resize(n);
  out.reduce_j.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const NodeProfile& node = instance.nodes[k];
    out.map_j[k] = map_cost(instance.config, node, allocation.load_bits[k])
                       .energy_j;
    out.shuffle_j[k] = shuffle_energy(instance.config, node,
                                      allocation.load_bits[k],
                                      allocation.shuffle_time_s[k]);
    out.reduce_j[k] = reduce_cost(instance.config, node).energy_j;
    out.map_total_j += out.map_j[k];
    out.shuffle_total_j += out.shuffle_j[k];
    out.reduce_total_j += out.reduce_j[k];
  }
  out.total_j = out.map_total_j + out.shuffle_total_j + out.reduce_total_j;
  return out;
}

std::string ConstraintViolation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::coverage:
      os << "coverage: sum of loads misses the dataset size by " << slack
         << " bits";
      break;
    case Kind::negative_load:
      os << "negative load at node " << *node + 1 << " (" << slack
         << " bits below zero)";
      break;
    case Kind::negative_shuffle_time:
      os << "negative shuffle time at node " << *node + 1 << " (" << slack
         << " s below zero)";
      break;
    case Kind::latency:
      os << "latency exceeded at node " << *node + 1 << " by " << slack
         << " s";
      break;
  }
  return os.str();
}

std::vector<ConstraintViolation> validate_allocation(
    const Instance& instance, const Allocation& allocation) {
  using Kind = ConstraintViolation::Kind;
  const std::size_t n = instance.size();
  if (allocation.load_bits.size() != n || allocation.shuffle_time_s.size() != n)
    throw std::invalid_argument("allocation does not match instance size");

  std::vector<ConstraintViolation> violations;
  double covered = 0;
  for (double load : allocation.load_bits) covered += load;
  const double coverage_gap = std::abs(covered - instance.config.dataset_bits);
  if (coverage_gap > kCoverageRelTol * instance.config.dataset_bits)
    violations.push_back({Kind::coverage, std::nullopt, coverage_gap});

  const std::vector<double> taus = effective_latencies(instance);
  for (std::size_t k = 0; k < n; ++k) {
    const double load = allocation.load_bits[k];
    const double shuffle = allocation.shuffle_time_s[k];
    if (load < 0) violations.push_back({Kind::negative_load, k, -load});
    if (shuffle < 0)
      violations.push_back({Kind::negative_shuffle_time, k, -shuffle});
    const NodeProfile& node = instance.nodes[k];
    const double used =
        load * node.cycles_per_bit / node.clock_hz + shuffle;
    if (used > taus[k] + kLatencySlackS)
      violations.push_back({Kind::latency, k, used - taus[k]});
  }
  return violations;
}

const char* scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::optimal: return "optimal";
    case Scheme::blind: return "blind";
    case Scheme::solo: return "solo";
  }
  return "?";
}

double max_load(const Instance& instance, Scheme scheme) {
  const std::vector<double> taus = effective_latencies(instance);
  const double n = static_cast<double>(instance.size());
  switch (scheme) {
    case Scheme::optimal: {
      // Nodes that cannot even finish their fixed work carry no load.
      double total = 0;
      for (std::size_t k = 0; k < instance.size(); ++k) {
        const NodeProfile& node = instance.nodes[k];
        total += node.clock_hz / node.cycles_per_bit * std::max(0.0, taus[k]);
      }
      return total;
    }
    case Scheme::blind: {
      double worst = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < instance.size(); ++k) {
        const NodeProfile& node = instance.nodes[k];
        worst = std::min(worst,
                         node.clock_hz / node.cycles_per_bit * taus[k]);
      }
      return std::max(0.0, n * worst);
    }
    case Scheme::solo: {
      double worst = std::numeric_limits<double>::infinity();
      for (const NodeProfile& node : instance.nodes) {
        const double ratio = node.clock_hz / node.cycles_per_bit;
        worst = std::min(worst, ratio * instance.config.latency_s -
                                    instance.config.local_data_bits);
      }
      return std::max(0.0, worst);
    }
  }
  return 0;
}

}  // namespace wcc
