#include "wcc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "wcc/schemes.hpp"
#include "wcc/solver.hpp"

namespace wcc {

namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr std::uint64_t kOverdrawFactor = 1000;

// Static contiguous partition of [begin, end) across worker threads. Each
// call of fn(i) may only write to state owned by index i; the caller
// aggregates afterwards in index order, which keeps every result
// bit-identical whatever the worker count.
template <typename Fn>
void parallel_for(std::uint64_t begin, std::uint64_t end, unsigned jobs,
                  Fn&& fn) {
  const std::uint64_t count = end > begin ? end - begin : 0;
  if (jobs <= 1 || count < 2) {
    for (std::uint64_t i = begin; i < end; ++i) fn(i);
    return;
  }
  const auto workers =
      static_cast<unsigned>(std::min<std::uint64_t>(jobs, count));
  const std::uint64_t chunk = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t lo = begin + w * chunk;
    const std::uint64_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::uint64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

struct Phases {
  double map = 0, shuffle = 0, reduce = 0, total = 0;
};

Phases phases_of(const EnergyBreakdown& breakdown) {
  return {breakdown.map_total_j, breakdown.shuffle_total_j,
          breakdown.reduce_total_j, breakdown.total_j};
}

PhaseMeans summarize(const std::vector<Phases>& samples) {
  PhaseMeans out;
  const auto n = static_cast<double>(samples.size());
  if (samples.empty()) return out;
  for (const Phases& p : samples) {
    out.map_j += p.map;
    out.shuffle_j += p.shuffle;
    out.reduce_j += p.reduce;
    out.total_j += p.total;
  }
  out.map_j /= n;
  out.shuffle_j /= n;
  out.reduce_j /= n;
  out.total_j /= n;
  if (samples.size() > 1) {
    double vm = 0, vs = 0, vr = 0, vt = 0;
    for (const Phases& p : samples) {
      vm += (p.map - out.map_j) * (p.map - out.map_j);
      vs += (p.shuffle - out.shuffle_j) * (p.shuffle - out.shuffle_j);
      vr += (p.reduce - out.reduce_j) * (p.reduce - out.reduce_j);
      vt += (p.total - out.total_j) * (p.total - out.total_j);
    }
    const double scale = kZ95 / std::sqrt(n * (n - 1));
    out.ci_map_j = scale * std::sqrt(vm);
    out.ci_shuffle_j = scale * std::sqrt(vs);
    out.ci_reduce_j = scale * std::sqrt(vr);
    out.ci_total_j = scale * std::sqrt(vt);
  }
  return out;
}

double binomial_ci(double p, double n) {
  return kZ95 * std::sqrt(p * (1 - p) / n);
}

bool optimal_feasible(const Instance& instance,
                      const std::vector<double>& taus) {
  for (double tau_k : taus)
    if (tau_k < 0) return false;
  return instance.config.dataset_bits <=
         max_load(instance, Scheme::optimal);
}

void rethrow_first(const std::vector<std::exception_ptr>& errors) {
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

[[noreturn]] void conditioning_failure(const char* what, std::uint64_t found,
                                       std::uint64_t wanted,
                                       std::uint64_t attempts) {
  const double rate =
      static_cast<double>(found) / static_cast<double>(attempts);
  std::ostringstream os;
  os << what << ": found " << found << " of " << wanted
     << " feasible instances in " << attempts
     << " attempts (feasibility rate " << rate << ")";
  throw ConditioningError(os.str(), rate);
}

}  // namespace

OutagePoint estimate_outage(const DistributionSpec& spec,
                            const Workload& workload, std::size_t node_count,
                            double latency_s, std::uint64_t draws,
                            std::uint64_t master_seed, unsigned jobs) {
  spec.validate();
  if (draws < 1)
    throw std::invalid_argument("estimate_outage: draws must be >= 1");

  struct Flags {
    bool optimal = false, blind = false, solo = false;
  };
  std::vector<Flags> outage(draws);
  parallel_for(0, draws, jobs, [&](std::uint64_t i) {
    const Instance instance = sample_instance(spec, workload, node_count,
                                              latency_s, master_seed, i);
    const double target = workload.dataset_bits;
    outage[i].optimal = max_load(instance, Scheme::optimal) < target;
    outage[i].blind = max_load(instance, Scheme::blind) < target;
    outage[i].solo = max_load(instance, Scheme::solo) < target;
  });

  std::uint64_t n_opt = 0, n_blind = 0, n_solo = 0;
  for (const Flags& f : outage) {
    n_opt += f.optimal;
    n_blind += f.blind;
    n_solo += f.solo;
  }
  const auto n = static_cast<double>(draws);
  OutagePoint point;
  point.node_count = node_count;
  point.latency_s = latency_s;
  point.draws = draws;
  point.p_optimal = static_cast<double>(n_opt) / n;
  point.p_blind = static_cast<double>(n_blind) / n;
  point.p_solo = static_cast<double>(n_solo) / n;
  point.ci_optimal = binomial_ci(point.p_optimal, n);
  point.ci_blind = binomial_ci(point.p_blind, n);
  point.ci_solo = binomial_ci(point.p_solo, n);
  return point;
}

std::vector<SweepRecord> sweep_energy_vs_k(
    const DistributionSpec& spec, const Workload& workload, double latency_s,
    const std::vector<std::size_t>& node_grid, std::uint64_t draws,
    std::uint64_t master_seed, unsigned jobs) {
  spec.validate();
  if (draws < 1 || node_grid.empty())
    throw std::invalid_argument("sweep_energy_vs_k: empty plan");

  std::vector<SweepRecord> records;
  records.reserve(node_grid.size());

  for (std::size_t node_count : node_grid) {
    struct Eval {
      bool accepted = false;
      Phases optimal, blind;
    };
    const std::uint64_t cap = kOverdrawFactor * draws;
    std::vector<Phases> optimal_samples, blind_samples;
    optimal_samples.reserve(draws);
    blind_samples.reserve(draws);
    std::uint64_t scanned = 0;

    while (optimal_samples.size() < draws && scanned < cap) {
      const std::uint64_t remaining = draws - optimal_samples.size();
      const std::uint64_t block =
          std::min(cap - scanned, std::max<std::uint64_t>(remaining, 256));
      std::vector<Eval> evals(block);
      std::vector<std::exception_ptr> errors(block);
      parallel_for(0, block, jobs, [&](std::uint64_t j) {
        try {
          const Instance instance =
              sample_instance(spec, workload, node_count, latency_s,
                              master_seed, scanned + j);
          const SchemeResult blind = blind_allocation(instance);
          if (!blind.feasible) return;  // blind-feasible implies optimal
          evals[j].accepted = true;
          evals[j].optimal = phases_of(solve(instance).breakdown);
          evals[j].blind = phases_of(*blind.breakdown);
        } catch (...) {
          errors[j] = std::current_exception();
        }
      });
      rethrow_first(errors);
      for (std::uint64_t j = 0; j < block; ++j) {
        ++scanned;
        if (!evals[j].accepted) continue;
        optimal_samples.push_back(evals[j].optimal);
        blind_samples.push_back(evals[j].blind);
        if (optimal_samples.size() == draws) break;
      }
    }
    if (optimal_samples.size() < draws)
      conditioning_failure("sweep_energy_vs_k", optimal_samples.size(),
                           draws, scanned);

    SweepRecord record;
    record.x = static_cast<double>(node_count);
    record.optimal = summarize(optimal_samples);
    record.blind = summarize(blind_samples);
    record.draws = draws;
    record.attempts = scanned;
    record.feasible_rate =
        static_cast<double>(draws) / static_cast<double>(scanned);
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<SweepRecord> sweep_energy_vs_tau(
    const DistributionSpec& spec, const Workload& workload,
    std::size_t node_count, const std::vector<double>& latency_grid,
    std::uint64_t draws, std::uint64_t master_seed, unsigned jobs) {
  spec.validate();
  if (draws < 1 || latency_grid.empty())
    throw std::invalid_argument("sweep_energy_vs_tau: empty plan");

  // Conditioning on feasibility at the smallest latency keeps the accepted
  // draw set identical across the whole grid (the feasible set only grows
  // with the budget), so per-draw latency trends are exact.
  const double latency_min =
      *std::min_element(latency_grid.begin(), latency_grid.end());

  struct Eval {
    bool accepted = false;
    std::vector<Phases> per_latency;
  };
  const std::uint64_t cap = kOverdrawFactor * draws;
  std::vector<std::vector<Phases>> samples(latency_grid.size());
  for (auto& s : samples) s.reserve(draws);
  std::uint64_t scanned = 0;
  std::uint64_t accepted = 0;

  while (accepted < draws && scanned < cap) {
    const std::uint64_t remaining = draws - accepted;
    const std::uint64_t block =
        std::min(cap - scanned, std::max<std::uint64_t>(remaining, 256));
    std::vector<Eval> evals(block);
    std::vector<std::exception_ptr> errors(block);
    parallel_for(0, block, jobs, [&](std::uint64_t j) {
      try {
        Instance instance = sample_instance(spec, workload, node_count,
                                            latency_min, master_seed,
                                            scanned + j);
        if (!optimal_feasible(instance, effective_latencies(instance)))
          return;
        evals[j].accepted = true;
        evals[j].per_latency.resize(latency_grid.size());
        for (std::size_t g = 0; g < latency_grid.size(); ++g) {
          instance.config.latency_s = latency_grid[g];
          evals[j].per_latency[g] = phases_of(solve(instance).breakdown);
        }
      } catch (...) {
        errors[j] = std::current_exception();
      }
    });
    rethrow_first(errors);
    for (std::uint64_t j = 0; j < block; ++j) {
      ++scanned;
      if (!evals[j].accepted) continue;
      for (std::size_t g = 0; g < latency_grid.size(); ++g)
        samples[g].push_back(evals[j].per_latency[g]);
      if (++accepted == draws) break;
    }
  }
  if (accepted < draws)
    conditioning_failure("sweep_energy_vs_tau", accepted, draws, scanned);

  std::vector<SweepRecord> records;
  records.reserve(latency_grid.size());
  for (std::size_t g = 0; g < latency_grid.size(); ++g) {
    SweepRecord record;
    record.x = latency_grid[g];
    record.optimal = summarize(samples[g]);
    record.draws = draws;
    record.attempts = scanned;
    record.feasible_rate =
        static_cast<double>(draws) / static_cast<double>(scanned);
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace wcc
