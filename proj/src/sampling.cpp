#include "wcc/sampling.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace wcc {

std::vector<double> DistributionSpec::default_clock_levels() {
  std::vector<double> levels(10);
  for (std::size_t i = 0; i < levels.size(); ++i)
    levels[i] = static_cast<double>(i + 1) * 1e8;
  return levels;
}

void DistributionSpec::validate() const {
  auto require = [](bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
  };
  require(cycles_per_bit_lo > 0 && cycles_per_bit_hi >= cycles_per_bit_lo,
          "cycles_per_bit range must be positive and ordered");
  require(energy_per_cycle_lo_j > 0 &&
              energy_per_cycle_hi_j >= energy_per_cycle_lo_j,
          "energy_per_cycle range must be positive and ordered");
  require(!clock_levels_hz.empty(), "clock_levels_hz must be non-empty");
  for (double level : clock_levels_hz)
    require(level > 0, "clock levels must be positive");
  require(channel_gain_mean > 0, "channel_gain_mean must be positive");
  require(bandwidth_hz > 0, "bandwidth_hz must be positive");
  require(noise_power_w > 0, "noise_power_w must be positive");
  require(snr_gap >= 1, "snr_gap must be >= 1");
}

namespace {

std::uint64_t avalanche(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace

std::uint64_t child_seed(std::uint64_t master_seed,
                         std::uint64_t draw_index) {
  return avalanche(avalanche(master_seed + kGolden) ^
                   avalanche(draw_index * kGolden + 1));
}

Instance sample_instance(const DistributionSpec& spec,
                         const Workload& workload, std::size_t node_count,
                         double latency_s, std::uint64_t master_seed,
                         std::uint64_t draw_index) {
  spec.validate();
  if (node_count < 1)
    throw std::invalid_argument("sample_instance: node_count must be >= 1");

  Instance instance;
  instance.config.node_count = node_count;
  instance.config.dataset_bits = workload.dataset_bits;
  instance.config.local_data_bits = workload.local_data_bits;
  instance.config.intermediate_bits = workload.intermediate_bits;
  instance.config.latency_s = latency_s;
  instance.config.bandwidth_hz = spec.bandwidth_hz;
  instance.config.noise_power_w = spec.noise_power_w;
  instance.config.snr_gap = spec.snr_gap;

  std::mt19937_64 rng(child_seed(master_seed, draw_index));
  // (0, 1) strictly, from the top 53 bits; keeps log() finite and the
  // draws identical on any platform (stdlib distributions are not
  // bit-portable, the raw engine output is).
  auto unit = [&rng] {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  };

  instance.nodes.resize(node_count);
  for (NodeProfile& node : instance.nodes) {
    node.cycles_per_bit =
        spec.cycles_per_bit_lo +
        (spec.cycles_per_bit_hi - spec.cycles_per_bit_lo) * unit();
    node.energy_per_cycle_j =
        spec.energy_per_cycle_lo_j +
        (spec.energy_per_cycle_hi_j - spec.energy_per_cycle_lo_j) * unit();
    const auto level = static_cast<std::size_t>(
        unit() * static_cast<double>(spec.clock_levels_hz.size()));
    node.clock_hz = spec.clock_levels_hz[std::min(
        level, spec.clock_levels_hz.size() - 1)];
    node.channel_gain = -spec.channel_gain_mean * std::log(unit());
  }
  return instance;
}

}  // namespace wcc
