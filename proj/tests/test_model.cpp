#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "test_util.hpp"
#include "wcc/model.hpp"

using namespace wcc;
using test::symmetric_instance;

TEST_CASE("shuffle ratio") {
  SystemConfig config = symmetric_instance().config;

  config.node_count = 1;
  CHECK(shuffle_ratio(config) == 0.0);

  config.node_count = 2;
  config.intermediate_bits = 5e3;
  config.dataset_bits = 1e6;
  CHECK(shuffle_ratio(config) == doctest::Approx(0.005).epsilon(1e-12));

  config.node_count = 61;
  config.dataset_bits = 4e6;
  CHECK(shuffle_ratio(config) == doctest::Approx(0.075).epsilon(1e-12));
}

TEST_CASE("effective latency") {
  SUBCASE("reduce and local-data terms subtract") {
    const Instance instance = symmetric_instance();
    CHECK(effective_latency(instance, 0) ==
          doctest::Approx(0.9948).epsilon(1e-12));
    CHECK(effective_latencies(instance)[1] ==
          doctest::Approx(0.9948).epsilon(1e-12));
  }
  SUBCASE("vanishing terms leave the full budget") {
    Instance instance = symmetric_instance(1);
    instance.config.local_data_bits = 0;
    instance.config.intermediate_bits = 1e-9;
    CHECK(effective_latency(instance, 0) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("reduce phase can consume the whole budget") {
    Instance instance = symmetric_instance(1);
    instance.config.local_data_bits = 0;
    instance.config.latency_s = 0.005;
    CHECK(std::abs(effective_latency(instance, 0)) < 1e-15);
  }
  SUBCASE("max is over all nodes") {
    Instance instance = symmetric_instance(2);
    instance.nodes[1].clock_hz = 1e8;  // slowest reducer: 5e3*1e-5 = 0.05 s
    const auto taus = effective_latencies(instance);
    CHECK(taus[0] == doctest::Approx(1 - 0.05 - 0.0002).epsilon(1e-12));
    CHECK(taus[1] == doctest::Approx(1 - 0.05 - 0.002).epsilon(1e-12));
  }
}

TEST_CASE("map cost") {
  const Instance instance = symmetric_instance();
  const auto [energy, time] = map_cost(instance.config, instance.nodes[0], 5e5);
  CHECK(energy == doctest::Approx(0.05002).epsilon(1e-12));
  CHECK(time == doctest::Approx(0.5002).epsilon(1e-12));

  SystemConfig no_local = instance.config;
  no_local.local_data_bits = 0;
  const auto zero = map_cost(no_local, instance.nodes[0], 0);
  CHECK(zero.energy_j == 0.0);
  CHECK(zero.time_s == 0.0);

  SystemConfig single = instance.config;
  single.node_count = 1;
  const auto full = map_cost(single, instance.nodes[0], 4e6);
  CHECK(full.energy_j == doctest::Approx(0.4000100).epsilon(1e-12));
  CHECK(full.time_s == doctest::Approx(4.0001).epsilon(1e-12));
}

TEST_CASE("map cost is affine in the load") {
  const Instance instance = symmetric_instance();
  const double slope_e =
      instance.nodes[0].cycles_per_bit * instance.nodes[0].energy_per_cycle_j;
  const double slope_t =
      instance.nodes[0].cycles_per_bit / instance.nodes[0].clock_hz;
  const PhaseCost base = map_cost(instance.config, instance.nodes[0], 0);
  for (double load : {1.0, 3.3e5, 9.9e6}) {
    const PhaseCost cost = map_cost(instance.config, instance.nodes[0], load);
    CHECK(cost.energy_j ==
          doctest::Approx(base.energy_j + slope_e * load).epsilon(1e-12));
    CHECK(cost.time_s ==
          doctest::Approx(base.time_s + slope_t * load).epsilon(1e-12));
  }
}

TEST_CASE("reduce cost") {
  const Instance instance = symmetric_instance();
  const auto cost = reduce_cost(instance.config, instance.nodes[0]);
  CHECK(cost.energy_j == doctest::Approx(5e-4).epsilon(1e-12));
  CHECK(cost.time_s == doctest::Approx(5e-3).epsilon(1e-12));

  const NodeProfile slow{1500, 2e-10, 1e8, 1e-3};
  const auto other = reduce_cost(instance.config, slow);
  CHECK(other.energy_j == doctest::Approx(1.5e-3).epsilon(1e-12));
  CHECK(other.time_s == doctest::Approx(7.5e-2).epsilon(1e-12));

  SystemConfig tiny = instance.config;
  tiny.intermediate_bits = 1e-30;
  CHECK(reduce_cost(tiny, instance.nodes[0]).energy_j < 1e-35);
  CHECK(reduce_cost(tiny, instance.nodes[0]).time_s < 1e-35);
}

TEST_CASE("power for rate") {
  const SystemConfig config = symmetric_instance().config;
  CHECK(power_for_rate(config, 0) == 0.0);
  CHECK(power_for_rate(config, config.bandwidth_hz) ==
        doctest::Approx(1e-9).epsilon(1e-12));
  CHECK(power_for_rate(config, 3 * config.bandwidth_hz) ==
        doctest::Approx(7e-9).epsilon(1e-12));
  CHECK(power_for_rate(config, 1e12) ==
        std::numeric_limits<double>::infinity());
}

TEST_CASE("rate/power duality") {
  const SystemConfig config = symmetric_instance().config;
  const double gain = 1e-3;
  for (double power : {1e-12, 3.7e-9, 2.5e-6, 1e-3, 0.2}) {
    const double rate =
        config.bandwidth_hz *
        std::log2(1 + power * gain / (config.snr_gap * config.noise_power_w));
    CHECK(power_for_rate(config, rate) / gain ==
          doctest::Approx(power).epsilon(1e-12));
  }
}

TEST_CASE("shuffle energy") {
  const Instance instance = symmetric_instance();
  const SystemConfig& config = instance.config;
  const NodeProfile& node = instance.nodes[0];

  CHECK(shuffle_energy(config, node, 0, 0.5) == 0.0);
  CHECK(shuffle_energy(config, node, 0, 0) == 0.0);
  CHECK(shuffle_energy(config, node, 1.0, 0) ==
        std::numeric_limits<double>::infinity());

  // Direct evaluation: 2500 bits over 0.49 s through a 1e-3 channel.
  const double expected =
      0.49 / 1e-3 * 1e-9 * (std::exp2(2500.0 / 0.49 / 15e3) - 1);
  CHECK(shuffle_energy(config, node, 5e5, 0.49) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(1.303e-7).epsilon(1e-3));

  SystemConfig single = config;
  single.node_count = 1;
  CHECK(shuffle_energy(single, node, 7e5, 0.3) == 0.0);
}

TEST_CASE("shuffle energy decreases with the transmit duration") {
  const Instance instance = symmetric_instance();
  double previous = std::numeric_limits<double>::infinity();
  for (double t : {0.01, 0.05, 0.1, 0.3, 0.7, 0.99}) {
    const double e =
        shuffle_energy(instance.config, instance.nodes[0], 5e5, t);
    CHECK(e < previous);
    previous = e;
  }
}

TEST_CASE("shuffle energy is midpoint-convex in (load, time)") {
  const Instance instance = symmetric_instance();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> load_dist(1e3, 9e5);
  std::uniform_real_distribution<double> time_dist(0.01, 0.99);
  for (int trial = 0; trial < 200; ++trial) {
    const double l1 = load_dist(rng), l2 = load_dist(rng);
    const double t1 = time_dist(rng), t2 = time_dist(rng);
    const double mid = shuffle_energy(instance.config, instance.nodes[0],
                                      (l1 + l2) / 2, (t1 + t2) / 2);
    const double avg =
        0.5 * shuffle_energy(instance.config, instance.nodes[0], l1, t1) +
        0.5 * shuffle_energy(instance.config, instance.nodes[0], l2, t2);
    CHECK(mid <= avg * (1 + 1e-12));
    // Strict except along rays through the origin, which random pairs miss.
    if (std::abs(l1 * t2 - l2 * t1) > 1e-6 * l1 * t1)
      CHECK(mid < avg);
  }
}

TEST_CASE("total energy") {
  const Instance instance = symmetric_instance();
  Allocation allocation{{5e5, 5e5}, {0.4948, 0.4948}};
  const EnergyBreakdown breakdown = total_energy(instance, allocation);

  CHECK(breakdown.map_total_j == doctest::Approx(0.10004).epsilon(1e-12));
  CHECK(breakdown.reduce_total_j == doctest::Approx(1e-3).epsilon(1e-12));
  const double shuffle_each =
      0.4948 / 1e-3 * 1e-9 * (std::exp2(2500.0 / 0.4948 / 15e3) - 1);
  CHECK(breakdown.shuffle_total_j ==
        doctest::Approx(2 * shuffle_each).epsilon(1e-12));
  CHECK(breakdown.total_j ==
        doctest::Approx(breakdown.map_total_j + breakdown.shuffle_total_j +
                        breakdown.reduce_total_j)
            .epsilon(1e-15));
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(breakdown.map_j[k] >= 0);
    CHECK(breakdown.shuffle_j[k] >= 0);
    CHECK(breakdown.reduce_j[k] >= 0);
  }
}

TEST_CASE("total energy with all-zero loads has only fixed terms") {
  for (std::uint64_t i = 0; i < 5; ++i) {
    const Instance instance = test::random_instance(4, 1.0, 1e6, 11, i);
    Allocation zero{{0, 0, 0, 0}, {0.1, 0.2, 0.3, 0.4}};
    const EnergyBreakdown breakdown = total_energy(instance, zero);
    CHECK(breakdown.shuffle_total_j == 0.0);
    double fixed = 0;
    for (const NodeProfile& node : instance.nodes)
      fixed += (4 * instance.config.local_data_bits +
                instance.config.intermediate_bits) *
               node.cycles_per_bit * node.energy_per_cycle_j;
    CHECK(breakdown.total_j == doctest::Approx(fixed).epsilon(1e-12));
  }
}

TEST_CASE("single forced partition") {
  Instance instance = symmetric_instance(1, 6.0, 4e6);
  Allocation allocation{{4e6}, {0.0}};
  const EnergyBreakdown breakdown = total_energy(instance, allocation);
  const double expected =
      map_cost(instance.config, instance.nodes[0], 4e6).energy_j +
      reduce_cost(instance.config, instance.nodes[0]).energy_j;
  CHECK(breakdown.total_j == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("allocation validation") {
  const Instance instance = symmetric_instance();

  SUBCASE("feasible symmetric allocation") {
    Allocation good{{5e5, 5e5}, {0.4948, 0.4948}};
    CHECK(validate_allocation(instance, good).empty());
  }
  SUBCASE("latency violation names the node") {
    // Node 1 maps the whole dataset: 1 s of map time > tau_1 = 0.9948 s.
    Allocation bad{{1e6, 0}, {0.0, 0.9948}};
    const auto violations = validate_allocation(instance, bad);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].kind == ConstraintViolation::Kind::latency);
    CHECK(violations[0].node == 0);
    CHECK(violations[0].slack == doctest::Approx(1.0 - 0.9948).epsilon(1e-9));
    CHECK(violations[0].describe().find("node 1") != std::string::npos);
  }
  SUBCASE("coverage violation") {
    Allocation bad{{4.5e5, 4.5e5}, {0.4, 0.4}};
    const auto violations = validate_allocation(instance, bad);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].kind == ConstraintViolation::Kind::coverage);
    CHECK(!violations[0].node.has_value());
  }
  SUBCASE("negative entries are flagged") {
    Allocation bad{{1e6 + 1.0, -1.0}, {0.4, -0.01}};
    const auto violations = validate_allocation(instance, bad);
    bool saw_load = false, saw_time = false;
    for (const auto& v : violations) {
      saw_load |= v.kind == ConstraintViolation::Kind::negative_load;
      saw_time |= v.kind == ConstraintViolation::Kind::negative_shuffle_time;
    }
    CHECK(saw_load);
    CHECK(saw_time);
  }
}

TEST_CASE("maximum load per scheme") {
  SUBCASE("symmetric two-node example") {
    const Instance instance = symmetric_instance();
    CHECK(max_load(instance, Scheme::optimal) ==
          doctest::Approx(1.9896e6).epsilon(1e-12));
    CHECK(max_load(instance, Scheme::blind) ==
          doctest::Approx(1.9896e6).epsilon(1e-12));
    CHECK(max_load(instance, Scheme::solo) ==
          doctest::Approx(9.999e5).epsilon(1e-12));
  }
  SUBCASE("single node: optimal equals blind") {
    const Instance instance = symmetric_instance(1);
    CHECK(max_load(instance, Scheme::optimal) ==
          doctest::Approx(max_load(instance, Scheme::blind)).epsilon(1e-15));
  }
  SUBCASE("sum versus K times the minimum") {
    Instance instance = symmetric_instance(2);
    instance.config.local_data_bits = 0;
    instance.config.intermediate_bits = 1e-6;
    instance.config.latency_s = 1.0;
    // (F/C) tau_k of 1e6 and 1e4.
    instance.nodes[0] = {1000, 1e-10, 1e9, 1e-3};
    instance.nodes[1] = {1000, 1e-10, 1e7, 1e-3};
    CHECK(max_load(instance, Scheme::optimal) ==
          doctest::Approx(1.01e6).epsilon(1e-9));
    CHECK(max_load(instance, Scheme::blind) ==
          doctest::Approx(2e4).epsilon(1e-9));
  }
  SUBCASE("negative effective latencies clamp to zero") {
    Instance instance = symmetric_instance(2);
    instance.config.latency_s = 1e-4;  // reduce phase alone needs 5 ms
    CHECK(max_load(instance, Scheme::optimal) == 0.0);
    CHECK(max_load(instance, Scheme::blind) == 0.0);
  }
  SUBCASE("optimal dominates blind on random populations") {
    for (std::uint64_t i = 0; i < 50; ++i) {
      const Instance instance = test::random_instance(6, 0.7, 4e6, 3, i);
      CHECK(max_load(instance, Scheme::optimal) >=
            max_load(instance, Scheme::blind));
    }
  }
}

TEST_CASE("config and profile validation") {
  Instance instance = symmetric_instance();
  CHECK_NOTHROW(instance.validate());

  Instance bad = instance;
  bad.nodes[1].clock_hz = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = instance;
  bad.config.snr_gap = 0.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = instance;
  bad.nodes.pop_back();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
