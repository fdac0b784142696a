// wccmr: energy-minimal Map-Reduce load allocation across heterogeneous
// wireless nodes, plus the Monte-Carlo experiment driver.
//
// Exit codes: 0 success, 1 usage/parse error, 2 infeasible instance or
// failed feasibility conditioning, 3 solver non-convergence.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wcc/experiments.hpp"
#include "wcc/instance_io.hpp"
#include "wcc/schemes.hpp"
#include "wcc/solver.hpp"

namespace {

using namespace wcc;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitNoConvergence = 3;

std::string num(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.12e", v);
  return buffer;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_output(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

// ---------------------------------------------------------------------------
// Experiment configs: the flat key-value format shared with instance files,
// carrying the workload, grids and optional distribution overrides.

struct ExperimentConfig {
  Workload workload;
  DistributionSpec spec;
  std::vector<std::size_t> node_grid;
  std::vector<double> latency_grid;
  std::uint64_t draws = 10000;
  std::uint64_t seed = 0;
};

ExperimentConfig parse_experiment_config(const std::string& text) {
  const auto sections = parse_config_sections(text);
  if (sections.size() > 1)
    throw ParseError(sections[1].line,
                     "experiment configs have no [" + sections[1].name +
                         "] section");

  ExperimentConfig config;
  bool have_l = false, have_t = false, have_k = false, have_tau = false;
  for (const ConfigEntry& entry : sections.front().entries) {
    const std::string& key = entry.key;
    if (key == "L_bits") {
      config.workload.dataset_bits = parse_number(entry);
      have_l = true;
    } else if (key == "D_bits") {
      config.workload.local_data_bits = parse_number(entry);
    } else if (key == "T_bits") {
      config.workload.intermediate_bits = parse_number(entry);
      have_t = true;
    } else if (key == "K") {
      config.node_grid = {static_cast<std::size_t>(parse_count(entry))};
      have_k = true;
    } else if (key == "K_grid") {
      config.node_grid.clear();
      for (double v : parse_number_list(entry)) {
        if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v)))
          throw ParseError(entry.line, "K_grid entries must be integers >= 1");
        config.node_grid.push_back(static_cast<std::size_t>(v));
      }
      have_k = true;
    } else if (key == "tau_s") {
      config.latency_grid = {parse_number(entry)};
      have_tau = true;
    } else if (key == "tau_grid_s") {
      config.latency_grid = parse_number_list(entry);
      have_tau = true;
    } else if (key == "draws") {
      config.draws = parse_count(entry);
    } else if (key == "seed") {
      config.seed = parse_count(entry);
    } else if (key == "C_min") {
      config.spec.cycles_per_bit_lo = parse_number(entry);
    } else if (key == "C_max") {
      config.spec.cycles_per_bit_hi = parse_number(entry);
    } else if (key == "P_min_pJ") {
      config.spec.energy_per_cycle_lo_j = parse_number(entry) * 1e-12;
    } else if (key == "P_max_pJ") {
      config.spec.energy_per_cycle_hi_j = parse_number(entry) * 1e-12;
    } else if (key == "F_levels_GHz") {
      config.spec.clock_levels_hz.clear();
      for (double v : parse_number_list(entry))
        config.spec.clock_levels_hz.push_back(v * 1e9);
    } else if (key == "h2_mean") {
      config.spec.channel_gain_mean = parse_number(entry);
    } else if (key == "B_kHz") {
      config.spec.bandwidth_hz = parse_number(entry) * 1e3;
    } else if (key == "sigma2_nW") {
      config.spec.noise_power_w = parse_number(entry) * 1e-9;
    } else if (key == "Gamma") {
      config.spec.snr_gap = parse_number(entry);
    } else {
      throw ParseError(entry.line, "unknown key: " + key);
    }
  }
  if (!have_l || !have_t)
    throw ParseError(1, "missing required key(s): need L_bits and T_bits");
  if (!have_k) throw ParseError(1, "missing required key: K or K_grid");
  if (!have_tau)
    throw ParseError(1, "missing required key: tau_s or tau_grid_s");
  config.spec.validate();
  return config;
}

// ---------------------------------------------------------------------------
// CSV renderers. Column sets are part of the documented interface; LF line
// endings, '.' decimal separator, header row always present.

std::string sweep_csv(const std::vector<SweepRecord>& records,
                      const std::string& x_name) {
  std::ostringstream os;
  os << x_name
     << ",scheme,E_map_J,E_shu_J,E_red_J,E_tot_J,feasible_rate,n,"
        "ci_halfwidth\n";
  auto row = [&](double x, const char* scheme, const PhaseMeans& m,
                 const SweepRecord& r) {
    os << num(x) << ',' << scheme << ',' << num(m.map_j) << ','
       << num(m.shuffle_j) << ',' << num(m.reduce_j) << ',' << num(m.total_j)
       << ',' << num(r.feasible_rate) << ',' << r.draws << ','
       << num(m.ci_total_j) << '\n';
  };
  for (const SweepRecord& r : records) {
    row(r.x, "optimal", r.optimal, r);
    if (r.blind) row(r.x, "blind", *r.blind, r);
  }
  return os.str();
}

std::string outage_csv(const std::vector<OutagePoint>& points) {
  std::ostringstream os;
  os << "K,tau_s,scheme,p_out,ci_halfwidth,n\n";
  auto row = [&](const OutagePoint& p, const char* scheme, double value,
                 double ci) {
    os << p.node_count << ',' << num(p.latency_s) << ',' << scheme << ','
       << num(value) << ',' << num(ci) << ',' << p.draws << '\n';
  };
  for (const OutagePoint& p : points) {
    row(p, "optimal", p.p_optimal, p.ci_optimal);
    row(p, "blind", p.p_blind, p.ci_blind);
    row(p, "solo", p.p_solo, p.ci_solo);
  }
  return os.str();
}

std::string solve_csv(const Instance& instance,
                      const OptimalSolution& solution) {
  std::ostringstream os;
  os << "node,l_bits,t_shu_s,p_W,E_map_J,E_shu_J,E_red_J,participating\n";
  for (std::size_t k = 0; k < instance.size(); ++k) {
    os << k + 1 << ',' << num(solution.allocation.load_bits[k]) << ','
       << num(solution.allocation.shuffle_time_s[k]) << ','
       << num(solution.transmit_power_w[k]) << ','
       << num(solution.breakdown.map_j[k]) << ','
       << num(solution.breakdown.shuffle_j[k]) << ','
       << num(solution.breakdown.reduce_j[k]) << ','
       << (solution.participating[k] ? 1 : 0) << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Pretty renderers.

void print_solution(const Instance& instance,
                    const OptimalSolution& solution) {
  const SystemConfig& config = instance.config;
  std::printf("instance: K=%zu, L=%g bits, tau=%g s, alpha=%g\n",
              config.node_count, config.dataset_bits, config.latency_s,
              shuffle_ratio(config));
  std::printf("dual price: %.9e J/bit (%d bisection iterations)\n",
              solution.dual.lambda, solution.dual.iterations);
  std::printf("%5s %14s %12s %12s %12s %12s %4s\n", "node", "l_bits",
              "t_shu_s", "p_W", "E_map_J", "E_shu_J", "in");
  for (std::size_t k = 0; k < instance.size(); ++k) {
    std::printf("%5zu %14.6e %12.6e %12.6e %12.6e %12.6e %4s\n", k + 1,
                solution.allocation.load_bits[k],
                solution.allocation.shuffle_time_s[k],
                solution.transmit_power_w[k], solution.breakdown.map_j[k],
                solution.breakdown.shuffle_j[k],
                solution.participating[k] ? "yes" : "no");
  }
  const EnergyBreakdown& b = solution.breakdown;
  std::printf("totals: E_map=%.6e J, E_shu=%.6e J, E_red=%.6e J, "
              "E_tot=%.6e J\n",
              b.map_total_j, b.shuffle_total_j, b.reduce_total_j, b.total_j);
}

void print_sweep(const std::vector<SweepRecord>& records,
                 const std::string& x_name) {
  std::printf("%8s %8s %12s %12s %12s %12s %8s\n", x_name.c_str(), "scheme",
              "E_map_J", "E_shu_J", "E_red_J", "E_tot_J", "feas");
  for (const SweepRecord& r : records) {
    auto row = [&](const char* scheme, const PhaseMeans& m) {
      std::printf("%8g %8s %12.5e %12.5e %12.5e %12.5e %8.4f\n", r.x, scheme,
                  m.map_j, m.shuffle_j, m.reduce_j, m.total_j,
                  r.feasible_rate);
    };
    row("optimal", r.optimal);
    if (r.blind) row("blind", *r.blind);
  }
}

void print_outage(const std::vector<OutagePoint>& points) {
  std::printf("%4s %8s %22s %22s %22s\n", "K", "tau_s", "P_out(optimal)",
              "P_out(blind)", "P_out(solo)");
  for (const OutagePoint& p : points) {
    std::printf("%4zu %8g %12.5f +-%.5f %12.5f +-%.5f %12.5f +-%.5f\n",
                p.node_count, p.latency_s, p.p_optimal, p.ci_optimal,
                p.p_blind, p.ci_blind, p.p_solo, p.ci_solo);
  }
}

// ---------------------------------------------------------------------------

struct CommandOptions {
  std::string config_path;
  std::string out_path;
  std::string format = "pretty";
  std::uint64_t seed = 0;
  std::uint64_t draws = 0;
  unsigned jobs = 1;
  bool seed_set = false;
  bool draws_set = false;
};

void add_common(CLI::App* cmd, CommandOptions& opts, bool experiment) {
  cmd->add_option("--config", opts.config_path, "input config file")
      ->required();
  cmd->add_option("--out", opts.out_path, "write CSV to this path");
  cmd->add_option("--format", opts.format, "stdout format")
      ->check(CLI::IsMember({"pretty", "csv"}));
  if (experiment) {
    cmd->add_option("--seed", opts.seed, "master seed (overrides config)");
    cmd->add_option("--draws", opts.draws,
                    "Monte-Carlo draws (overrides config)");
    cmd->add_option("--jobs", opts.jobs, "worker threads for draws")
        ->check(CLI::PositiveNumber);
  }
}

void apply_overrides(const CLI::App* cmd, const CommandOptions& opts,
                     ExperimentConfig& config) {
  if (cmd->count("--seed")) config.seed = opts.seed;
  if (cmd->count("--draws")) config.draws = opts.draws;
  if (config.draws < 1)
    throw std::runtime_error("draws must be >= 1");
}

void emit(const CommandOptions& opts, const std::string& csv,
          const std::function<void()>& pretty) {
  if (opts.format == "csv")
    std::fputs(csv.c_str(), stdout);
  else
    pretty();
  if (!opts.out_path.empty()) write_output(opts.out_path, csv);
}

int run_solve(const CommandOptions& opts) {
  const Instance instance =
      parse_instance_file(read_file(opts.config_path)).instance;
  const OptimalSolution solution = solve(instance);
  emit(opts, solve_csv(instance, solution),
       [&] { print_solution(instance, solution); });
  return kExitOk;
}

int run_validate(const CommandOptions& opts) {
  const InstanceFile file = parse_instance_file(read_file(opts.config_path));
  const Instance& instance = file.instance;
  const auto taus = effective_latencies(instance);

  std::printf("instance: K=%zu, L=%g bits, alpha=%g\n",
              instance.config.node_count, instance.config.dataset_bits,
              shuffle_ratio(instance.config));
  for (std::size_t k = 0; k < instance.size(); ++k)
    std::printf("  node %zu: tau_k = %.6e s\n", k + 1, taus[k]);
  for (Scheme scheme : {Scheme::optimal, Scheme::blind, Scheme::solo}) {
    const double cap = max_load(instance, scheme);
    std::printf("  L_max(%s) = %.6e bits -> %s\n", scheme_name(scheme), cap,
                cap >= instance.config.dataset_bits ? "feasible"
                                                    : "infeasible");
  }

  if (!file.allocation) return kExitOk;
  const auto violations = validate_allocation(instance, *file.allocation);
  if (violations.empty()) {
    const EnergyBreakdown b = total_energy(instance, *file.allocation);
    std::printf("allocation: feasible, E_tot=%.6e J\n", b.total_j);
    return kExitOk;
  }
  for (const ConstraintViolation& v : violations)
    std::printf("allocation violation: %s\n", v.describe().c_str());
  std::fprintf(stderr, "infeasible: allocation violates %zu constraint(s)\n",
               violations.size());
  return kExitInfeasible;
}

int run_outage(const CLI::App* cmd, const CommandOptions& opts) {
  ExperimentConfig config =
      parse_experiment_config(read_file(opts.config_path));
  apply_overrides(cmd, opts, config);

  std::vector<OutagePoint> points;
  for (std::size_t node_count : config.node_grid)
    for (double tau : config.latency_grid)
      points.push_back(estimate_outage(config.spec, config.workload,
                                       node_count, tau, config.draws,
                                       config.seed, opts.jobs));
  emit(opts, outage_csv(points), [&] { print_outage(points); });
  return kExitOk;
}

int run_sweep_k(const CLI::App* cmd, const CommandOptions& opts) {
  ExperimentConfig config =
      parse_experiment_config(read_file(opts.config_path));
  apply_overrides(cmd, opts, config);
  if (config.latency_grid.size() != 1)
    throw std::runtime_error("sweep-k needs a scalar tau_s");

  const auto records = sweep_energy_vs_k(
      config.spec, config.workload, config.latency_grid.front(),
      config.node_grid, config.draws, config.seed, opts.jobs);
  emit(opts, sweep_csv(records, "K"), [&] { print_sweep(records, "K"); });
  return kExitOk;
}

int run_sweep_tau(const CLI::App* cmd, const CommandOptions& opts) {
  ExperimentConfig config =
      parse_experiment_config(read_file(opts.config_path));
  apply_overrides(cmd, opts, config);
  if (config.node_grid.size() != 1)
    throw std::runtime_error("sweep-tau needs a scalar K");

  const auto records = sweep_energy_vs_tau(
      config.spec, config.workload, config.node_grid.front(),
      config.latency_grid, config.draws, config.seed, opts.jobs);
  emit(opts, sweep_csv(records, "tau_s"),
       [&] { print_sweep(records, "tau_s"); });
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"energy-minimal Map-Reduce allocation over wireless nodes"};
  app.require_subcommand(1);

  CommandOptions solve_opts, validate_opts, outage_opts, sweep_k_opts,
      sweep_tau_opts;
  CLI::App* solve_cmd =
      app.add_subcommand("solve", "optimal allocation for one instance");
  add_common(solve_cmd, solve_opts, false);
  CLI::App* validate_cmd = app.add_subcommand(
      "validate", "check an instance file and optional allocation");
  add_common(validate_cmd, validate_opts, false);
  CLI::App* outage_cmd = app.add_subcommand(
      "outage", "empirical outage probabilities per scheme");
  add_common(outage_cmd, outage_opts, true);
  CLI::App* sweep_k_cmd = app.add_subcommand(
      "sweep-k", "mean energy versus node count (optimal and blind)");
  add_common(sweep_k_cmd, sweep_k_opts, true);
  CLI::App* sweep_tau_cmd = app.add_subcommand(
      "sweep-tau", "mean optimal energy versus latency budget");
  add_common(sweep_tau_cmd, sweep_tau_opts, true);

  try {
    app.parse(argc, argv);
    if (solve_cmd->parsed()) return run_solve(solve_opts);
    if (validate_cmd->parsed()) return run_validate(validate_opts);
    if (outage_cmd->parsed()) return run_outage(outage_cmd, outage_opts);
    if (sweep_k_cmd->parsed()) return run_sweep_k(sweep_k_cmd, sweep_k_opts);
    if (sweep_tau_cmd->parsed())
      return run_sweep_tau(sweep_tau_cmd, sweep_tau_opts);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitUsage;
  } catch (const InfeasibleError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitInfeasible;
  } catch (const ConditioningError& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitInfeasible;
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitNoConvergence;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
}
