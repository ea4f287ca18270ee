#pragma once

// Concrete model families: the capacitated lost-sales inventory problem and
// the one-action model on [0, ell*] whose mu_ell jumps at ell*.

#include <cstdint>
#include <utility>
#include <vector>

#include "mdpr/core.hpp"

namespace mdpr {

/// Inventory on the grid {0, step, ..., capacity} plus the lost-sale state
/// 0_L, with order sizes {0, step, ..., max_order}.
struct InventorySpec {
  double capacity = 0.0;
  double max_order = 0.0;
  double grid_step = 1.0;
  /// (demand, probability), demands on multiples of grid_step.
  std::vector<std::pair<double, double>> demand_pmf;
  double fixed_cost = 0.0;
  double unit_cost = 0.0;
  /// Holding cost at each grid level 0, step, ..., capacity.
  std::vector<double> holding;

  /// Throws Error(InputError) describing the first violated invariant.
  void validate() const;
  std::size_t levels() const;  // capacity / step + 1
};

inline constexpr const char* kLostSaleLabel = "0_L";

/// Row-stochastic inventory MDP; the last state is 0_L. A stock-out moves
/// to 0_L, which behaves like level 0 afterwards and is charged h(0).
FiniteMdp build_inventory_mdp(const InventorySpec& spec);

/// Same dynamics with every transition into 0_L deleted, so the process
/// stops at the first lost sale. Throws when Assumption D fails.
FiniteMdp build_lost_sale_total_cost_mdp(const InventorySpec& spec);

struct DemandCheck {
  bool holds = false;
  double gamma = 0.0;  // P(D > max_order)
};

/// Assumption D: demand exceeds the maximum order with positive probability.
DemandCheck check_assumption_D(const InventorySpec& spec);

/// (ceil(C/M) + 1) / gamma^(ceil(C/M) + 1), an upper bound on the expected
/// time to the first lost sale under any policy. Throws when gamma = 0.
double k_ell_bound(const InventorySpec& spec);

/// The small lost-sales fixture: C=4, M=2, unit grid, demand {0:.3,1:.3,2:.2,3:.2},
/// K=5, unit cost 1, h(x) = x/2.
InventorySpec fixture_inventory();

/// ell* = (sqrt(5) - 1) / 2.
double remark1_ell();

struct Remark1Spec {
  std::vector<double> interior_grid;  // strictly increasing, inside (0, ell*)
  double cost = 1.0;

  void validate() const;
};

inline constexpr const char* kRemark1EllLabel = "ell";

/// States 0, the interior grid, then ell* (label "ell"); one action a0:
///   0   -> ell* w.p. 1
///   x   -> x w.p. x^2, 0 w.p. x, ell* w.p. 1 - x - x^2
///   ell*-> ell* w.p. 1 - ell*, 0 w.p. ell*
FiniteMdp build_remark1_mdp(const Remark1Spec& spec);

/// Grid {0.1, ..., 0.6} plus ell* - 1e-3.
Remark1Spec fixture_remark1();

struct SimulationResult {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t replications = 0;
};

/// Monte-Carlo estimate of the horizon-averaged cost (1/N) sum c(x_n, a_n).
/// Replication r draws from a mt19937_64 seeded with seed_seq{seed, r}.
SimulationResult simulate_policy(const FiniteMdp& m, const StationaryPolicy& phi,
                                 std::size_t start, std::size_t horizon,
                                 std::size_t replications, std::uint64_t seed);

}  // namespace mdpr
