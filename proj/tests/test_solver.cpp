#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "test_util.hpp"
#include "wcc/lambert.hpp"
#include "wcc/model.hpp"
#include "wcc/solver.hpp"

using namespace wcc;
using test::symmetric_instance;

namespace {

// Reduced per-node energy as a function of the shuffle time, with the load
// pinned to its active value; the independent side of the KKT checks.
double node_energy_at(const Instance& instance, std::size_t k, double t) {
  const NodeProfile& node = instance.nodes[k];
  const double fc = node.clock_hz / node.cycles_per_bit;
  const double load = fc * (effective_latency(instance, k) - t);
  return map_cost(instance.config, node, load).energy_j +
         shuffle_energy(instance.config, node, load, t);
}

Instance priced_pair() {
  // Participation prices near 1e-7 (node 1) and 1e-5 (node 2).
  Instance instance = symmetric_instance();
  instance.nodes[1].energy_per_cycle_j = 1e-8;
  return instance;
}

}  // namespace

TEST_CASE("participation price") {
  const Instance instance = symmetric_instance();
  // C P + alpha Gamma sigma^2 / |h|^2 * ln2 / B, evaluated directly.
  const double expected = 1e-7 + 0.005 * (1e-9 / 1e-3) * M_LN2 / 15e3;
  CHECK(participation_price(instance, 0) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(1.00000231e-7).epsilon(1e-8));

  SUBCASE("single node pays only the map slope") {
    const Instance solo = symmetric_instance(1);
    CHECK(participation_price(solo, 0) == doctest::Approx(1e-7).epsilon(1e-15));
  }
  SUBCASE("a free channel pays only the map slope") {
    Instance strong = symmetric_instance();
    strong.nodes[0].channel_gain = 1e12;
    CHECK(participation_price(strong, 0) ==
          doctest::Approx(1e-7).epsilon(1e-10));
  }
}

TEST_CASE("shuffle time at the dual price") {
  const Instance instance = symmetric_instance();
  const double tau_k = effective_latency(instance, 0);
  const double price = participation_price(instance, 0);

  SUBCASE("below and at the threshold the node is clamped out") {
    CHECK(shuffle_time_at(instance, 0, 0.5 * price) == tau_k);
    CHECK(shuffle_time_at(instance, 0, price) == tau_k);
  }
  SUBCASE("the closed form meets the clamp continuously") {
    // Direct evaluation at the threshold: W0((b-1)e^(b-1)) = b-1.
    const double fc =
        instance.nodes[0].clock_hz / instance.nodes[0].cycles_per_bit;
    const double b = shuffle_ratio(instance.config) * M_LN2 /
                     instance.config.bandwidth_hz * fc;
    const double w = lambert_w0((b - 1) * std::exp(b - 1));
    CHECK(b * tau_k / (w + 1) == doctest::Approx(tau_k).epsilon(1e-9));
  }
  SUBCASE("above the threshold the time is interior and decreasing") {
    double previous = tau_k;
    for (double factor : {1.001, 1.01, 1.1, 2.0, 10.0}) {
      const double t = shuffle_time_at(instance, 0, factor * price);
      CHECK(t > 0);
      CHECK(t < previous);
      previous = t;
    }
  }
}

TEST_CASE("assigned load versus the dual price") {
  const Instance instance = priced_pair();
  const double l_max = max_load(instance, Scheme::optimal);

  CHECK(assigned_load_at(instance, 0) == 0.0);
  CHECK(assigned_load_at(instance, 1e9) <= l_max);
  CHECK(assigned_load_at(instance, 1e9) ==
        doctest::Approx(l_max).epsilon(0.01));

  SUBCASE("between the two prices only the cheaper node is loaded") {
    const double lambda = 1.5e-7;
    REQUIRE(participation_price(instance, 0) < lambda);
    REQUIRE(participation_price(instance, 1) > lambda);
    CHECK(shuffle_time_at(instance, 0, lambda) <
          effective_latency(instance, 0));
    CHECK(shuffle_time_at(instance, 1, lambda) ==
          effective_latency(instance, 1));
    CHECK(assigned_load_at(instance, lambda) > 0);
  }
  SUBCASE("monotone non-decreasing on random instances") {
    for (std::uint64_t i = 0; i < 20; ++i) {
      const Instance random = test::random_instance(5, 1.0, 1e6, 21, i);
      double hi = 0;
      for (std::size_t k = 0; k < random.size(); ++k)
        hi = std::max(hi, participation_price(random, k));
      double previous = 0;
      for (int step = 0; step <= 100; ++step) {
        const double lambda = 2.0 * hi * step / 100;
        const double load = assigned_load_at(random, lambda);
        CHECK(load >= previous * (1 - 1e-12));
        previous = load;
      }
    }
  }
}

TEST_CASE("solve: forced single-node partition") {
  const Instance instance = symmetric_instance(1, 1.0, 5e5);
  const OptimalSolution solution = solve(instance);
  const double tau_0 = effective_latency(instance, 0);
  CHECK(solution.allocation.load_bits[0] == doctest::Approx(5e5));
  CHECK(solution.allocation.shuffle_time_s[0] ==
        doctest::Approx(tau_0 - 0.5).epsilon(1e-12));
  CHECK(solution.participating[0]);
  CHECK(solution.dual.lo <= solution.dual.lambda);
  CHECK(solution.dual.lambda <= solution.dual.hi);
  CHECK(validate_allocation(instance, solution.allocation).empty());
}

TEST_CASE("solve: symmetric nodes split evenly") {
  const Instance instance = symmetric_instance();
  const OptimalSolution solution = solve(instance);
  CHECK(solution.allocation.load_bits[0] ==
        doctest::Approx(5e5).epsilon(1e-6));
  CHECK(solution.allocation.load_bits[1] ==
        doctest::Approx(5e5).epsilon(1e-6));
  CHECK(solution.allocation.shuffle_time_s[0] ==
        doctest::Approx(0.4948).epsilon(1e-6));
  CHECK(solution.participating[0]);
  CHECK(solution.participating[1]);
  CHECK(validate_allocation(instance, solution.allocation).empty());

  // Latency constraints are active.
  const auto taus = effective_latencies(instance);
  for (std::size_t k = 0; k < 2; ++k) {
    const double used = solution.allocation.load_bits[k] * 1e-6 +
                        solution.allocation.shuffle_time_s[k];
    CHECK(used == doctest::Approx(taus[k]).epsilon(1e-12));
  }
}

TEST_CASE("solve: expensive node is priced out under light load") {
  Instance instance = priced_pair();
  instance.config.dataset_bits = 1e5;
  const OptimalSolution solution = solve(instance);
  CHECK(solution.allocation.load_bits[0] ==
        doctest::Approx(1e5).epsilon(1e-6));
  CHECK(solution.allocation.load_bits[1] == 0.0);
  CHECK(!solution.participating[1]);
  CHECK(solution.dual.lambda < participation_price(instance, 1));
  // Zero-load nodes keep the constraint active by convention.
  CHECK(solution.allocation.shuffle_time_s[1] ==
        effective_latency(instance, 1));
  CHECK(solution.transmit_power_w[1] == 0.0);
  CHECK(solution.transmit_power_w[0] > 0.0);
}

TEST_CASE("solve: infeasibility and convergence errors") {
  SUBCASE("negative effective latency") {
    Instance instance = symmetric_instance();
    instance.config.latency_s = 1e-4;
    CHECK_THROWS_AS(solve(instance), InfeasibleError);
  }
  SUBCASE("load above capacity") {
    Instance instance = symmetric_instance();
    instance.config.dataset_bits = 2.1e6;  // L_max_opt is 1.9896e6
    CHECK_THROWS_WITH_AS(solve(instance),
                         doctest::Contains("load exceeds L_max_opt"),
                         InfeasibleError);
  }
  SUBCASE("load exactly at capacity pins every shuffle time to zero") {
    // The feasible set degenerates to a single point whose shuffle phase
    // needs unbounded power; the solver returns it with infinite energy.
    Instance instance = symmetric_instance();
    instance.config.dataset_bits = max_load(instance, Scheme::optimal);
    const OptimalSolution solution = solve(instance);
    CHECK(solution.allocation.shuffle_time_s[0] == 0.0);
    CHECK(solution.allocation.shuffle_time_s[1] == 0.0);
    CHECK(std::isinf(solution.breakdown.shuffle_total_j));
    CHECK(validate_allocation(instance, solution.allocation).empty());
  }
}

TEST_CASE("solve: coverage and stationarity on random instances") {
  for (std::uint64_t i = 0; i < 20; ++i) {
    Instance instance = test::random_instance(5, 1.0, 1e6, 33, i);
    const auto taus = effective_latencies(instance);
    if (*std::min_element(taus.begin(), taus.end()) < 0) continue;
    if (max_load(instance, Scheme::optimal) < 1.05e6) continue;

    const OptimalSolution solution = solve(instance);
    double covered = 0;
    for (double load : solution.allocation.load_bits) covered += load;
    CHECK(covered == doctest::Approx(1e6).epsilon(1e-9));
    CHECK(validate_allocation(instance, solution.allocation).empty());

    for (std::size_t k = 0; k < instance.size(); ++k) {
      if (!solution.participating[k]) {
        CHECK(solution.allocation.shuffle_time_s[k] ==
              doctest::Approx(taus[k]).epsilon(1e-12));
        continue;
      }
      const double t = solution.allocation.shuffle_time_s[k];
      const double fc =
          instance.nodes[k].clock_hz / instance.nodes[k].cycles_per_bit;
      const double scale = instance.nodes[k].clock_hz *
                               instance.nodes[k].energy_per_cycle_j +
                           solution.dual.lambda * fc;

      // Analytic residual vanishes at the closed-form optimum.
      const double analytic =
          kkt_residual(instance, k, t, solution.dual.lambda);
      CHECK(std::abs(analytic) <= 1e-6 * scale);

      // And it matches a central finite difference of the energy.
      const double h = t * 1e-6;
      const double fd = (node_energy_at(instance, k, t + h) -
                         node_energy_at(instance, k, t - h)) /
                        (2 * h);
      CHECK(analytic ==
            doctest::Approx(fd + solution.dual.lambda * fc).epsilon(1e-5));
    }
  }
}

TEST_CASE("solve matches the exhaustive oracle on small instances") {
  int checked = 0;
  for (std::uint64_t i = 0; checked < 6 && i < 60; ++i) {
    const std::size_t nodes = 2 + i % 2;
    const Instance instance =
        test::random_instance(nodes, 1.0, 1e6, 55, i);
    const auto taus = effective_latencies(instance);
    if (*std::min_element(taus.begin(), taus.end()) < 0) continue;
    if (max_load(instance, Scheme::optimal) < 1.1e6) continue;
    ++checked;

    // The dual search covers the dataset to 1e-9 relative, which shows up
    // in the energy at about lambda * 1e-9 * L; allow that much slack.
    const OptimalSolution solution = solve(instance);
    const Allocation oracle = oracle_solve(instance, 201);
    const double oracle_energy = total_energy(instance, oracle).total_j;
    CHECK(solution.breakdown.total_j <= oracle_energy * (1 + 1e-8));
    CHECK(oracle_energy - solution.breakdown.total_j <=
          2e-3 * solution.breakdown.total_j);
  }
  CHECK(checked == 6);
}

TEST_CASE("oracle handles the degenerate and infeasible cases") {
  const Instance single = symmetric_instance(1, 1.0, 5e5);
  const Allocation forced = oracle_solve(single, 101);
  CHECK(forced.load_bits[0] == doctest::Approx(5e5));

  Instance overloaded = symmetric_instance();
  overloaded.config.dataset_bits = 2.1e6;
  CHECK_THROWS_AS(oracle_solve(overloaded, 101), InfeasibleError);

  CHECK_THROWS_AS(oracle_solve(test::random_instance(4, 1.0, 1e6, 1, 0), 11),
                  std::invalid_argument);
}

TEST_CASE("optimal energy is non-increasing in the latency budget") {
  for (std::uint64_t i = 0; i < 10; ++i) {
    Instance instance = test::random_instance(5, 0.8, 1e6, 77, i);
    const auto taus = effective_latencies(instance);
    if (*std::min_element(taus.begin(), taus.end()) < 0) continue;
    if (max_load(instance, Scheme::optimal) < 1.1e6) continue;

    double previous = std::numeric_limits<double>::infinity();
    for (double tau : {0.8, 1.0, 1.3, 1.7, 2.5}) {
      instance.config.latency_s = tau;
      const double energy = solve(instance).breakdown.total_j;
      CHECK(energy <= previous);
      previous = energy;
    }
  }
}
