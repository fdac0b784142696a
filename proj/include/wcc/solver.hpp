#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "wcc/model.hpp"

namespace wcc {

/// The instance cannot satisfy its constraints for the requested scheme.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& reason)
      : std::runtime_error("infeasible: " + reason) {}
};

/// The dual search ran out of iterations before hitting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what)
      : std::runtime_error("no convergence: " + what) {}
};

/// Final state of the dual bisection.
struct DualState {
  double lambda = 0;  ///< dual price (J/bit) the solution was built from
  double lo = 0;      ///< bracket at termination
  double hi = 0;
  int iterations = 0;
};

/// Energy-minimal allocation together with its certificates.
struct OptimalSolution {
  Allocation allocation;
  DualState dual;
  EnergyBreakdown breakdown;
  std::vector<bool> participating;      ///< l_k > 0
  std::vector<double> transmit_power_w; ///< RF power sustaining the shuffle
};

/// Marginal energy per assigned bit at zero load: C P for the Map plus the
/// zero-rate Shuffle slope. A node takes load only when the dual price
/// reaches this value.
double participation_price(const Instance& instance, std::size_t node);

/// Energy-optimal shuffle duration of one node at dual price lambda.
/// Returns tau_k when the node's participation price exceeds lambda (the
/// node carries no load); otherwise the closed-form interior optimum, which
/// lies in (0, tau_k] and meets tau_k continuously at the threshold.
double shuffle_time_at(const Instance& instance, std::size_t node,
                       double lambda);

/// Total load the nodes absorb at dual price lambda:
/// sum_k (F_k/C_k) (tau_k - t_k(lambda)). Continuous and non-decreasing;
/// 0 below the cheapest participation price, L_max(optimal) as lambda
/// grows. Nodes with negative tau_k contribute zero.
double assigned_load_at(const Instance& instance, double lambda);

/// Derivative of the reduced per-node Lagrangian with respect to the
/// shuffle time, evaluated at (t, lambda); zero at an interior optimum.
double kkt_residual(const Instance& instance, std::size_t node,
                    double shuffle_time_s, double lambda);

/// Energy-minimal allocation via bisection on the dual price.
/// Requires every tau_k >= 0 and L <= L_max(optimal); otherwise throws
/// InfeasibleError. Throws ConvergenceError past the iteration cap.
OptimalSolution solve(const Instance& instance);

/// Exhaustive minimum over the load simplex discretized with `grid_points`
/// values per axis, shuffle times pinned to their active values. A slow
/// independent check for solve(); requires K <= 3.
Allocation oracle_solve(const Instance& instance, std::size_t grid_points);

}  // namespace wcc
