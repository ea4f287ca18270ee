#pragma once

#include <cstddef>
#include <utility>

#include "mdpr/core.hpp"
#include "mdpr/transform.hpp"

namespace mdpr {

struct SolveReport {
  ValueVector value;
  StationaryPolicy greedy_policy;
  /// sup_x |v(x) - T v(x)| for the discounted Bellman operator T.
  double residual_sup = 0.0;
  std::size_t iterations = 0;
  double beta = 0.0;
  bool converged = false;
};

/// Bellman-greedy policy for v in a discounted problem, lowest index on ties.
StationaryPolicy greedy_policy(const DiscountedProblem& dp, std::span<const double> v);

/// Iterates v <- T v from 0 until the beta-geometric tail bound
/// beta/(1-beta) * ||v_n - v_{n-1}|| drops below tol. Unconverged runs
/// return a report with converged = false instead of throwing.
SolveReport value_iteration(const DiscountedProblem& dp, double tol = 1e-10,
                            std::size_t max_iter = 10'000'000);

/// Howard policy iteration with exact evaluation of (I - beta P_phi) v = c_phi.
/// A switch needs an improvement above 1e-12 relative to the value scale;
/// improvement rounds are capped at |X| * max|A(x)| with cycle detection.
SolveReport policy_iteration(const DiscountedProblem& dp, double tol = 1e-10);

/// (sup defect against the min-form, sup defect against the phi-form) of the
/// discounted optimality equation, over every state of dp.
std::pair<double, double> dcoe_residual(const DiscountedProblem& dp, std::span<const double> v,
                                        const StationaryPolicy& phi);

/// sup_x |v(x) - min_a [c(x,a) + sum_y v(y) q({y}|x,a)]|.
double tcoe_residual(const FiniteMdp& m, std::span<const double> v);

/// sup_x |w + h(x) - min_a [c(x,a) + sum_y h(y) q({y}|x,a)]|. Throws when q is
/// not row-stochastic.
double acoe_residual(const FiniteMdp& m, double w, std::span<const double> h);

}  // namespace mdpr
