#pragma once

// Rewrites of an undiscounted model into a discounted one.
//
// HV (total cost), weight mu:
//   c~(x,a)        = c(x,a) / mu(x)
//   p~({y}|x,a)    = mu(y) q({y}|x,a) / (beta mu(x))
//   p~({x~}|x,a)   = 1 - sum_y mu(y) q({y}|x,a) / (beta mu(x))
//
// HV-AG (average cost), weight mu_ell and marked state ell:
//   p-({y}|x,a)    = mu_ell(y) q({y}|x,a) / (beta mu_ell(x))         for y != ell
//   p-({ell}|x,a)  = (mu_ell(x) - 1 - sum_{y != ell} mu_ell(y) q({y}|x,a)) / (beta mu_ell(x))
//   p-({x-}|x,a)   = 1 - (mu_ell(x) - 1) / (beta mu_ell(x))
//
// In both cases the absorbing state is appended at index |X| with a single
// cost-free self-loop action, so original indices are preserved.

#include <cstddef>
#include <optional>

#include "mdpr/bounding.hpp"
#include "mdpr/core.hpp"

namespace mdpr {

enum class ReductionKind { HV, HVAG, Direct };

const char* to_string(ReductionKind k) noexcept;

struct DiscountedProblem {
  FiniteMdp mdp;  // row-stochastic, absorbing state last
  double beta = 0.0;
  std::size_t absorbing_state = 0;
  std::optional<std::size_t> marked_ell;
  WeightFunction weight_used;
  ReductionKind kind = ReductionKind::HV;
  /// Largest |row sum - 1| before clamping.
  double max_row_defect = 0.0;

  std::size_t num_original_states() const noexcept { return absorbing_state; }
};

/// Masses in [-kClampTol, 0) are clamped to zero and the row renormalized.
inline constexpr double kClampTol = 1e-12;
/// Upper end of the admissible discount range.
inline constexpr double kMaxBeta = 1.0 - 1e-6;

/// (K_hat - 1) / K_hat, the smallest admissible discount factor.
double min_admissible_beta(const BoundReport& bound);

/// HV rewrite. Throws Error(InvalidArgument) when beta is outside [0, 1) or
/// when a mass to x~ falls below -kClampTol ("mu does not satisfy
/// inequality mu >= V + Q mu; recompute mu").
DiscountedProblem hv_transform(const FiniteMdp& m, const WeightFunction& mu, double beta);

/// HV rewrite with beta checked against the certified bound. A missing beta
/// means the minimum admissible value.
DiscountedProblem hv_transform(const FiniteMdp& m, const BoundReport& mu,
                               std::optional<double> beta = std::nullopt);

/// HV-AG rewrite. Negative mass to ell signals a mu_ell that violates
/// mu_ell >= 1 + taboo Q mu_ell; negative mass to x- signals beta below
/// (K_ell - 1) / K_ell.
DiscountedProblem hvag_transform(const FiniteMdp& m, std::size_t ell, const WeightFunction& mu_ell,
                                 double beta);

DiscountedProblem hvag_transform(const FiniteMdp& m, std::size_t ell, const BoundReport& mu_ell,
                                 std::optional<double> beta = std::nullopt);

/// Appends an absorbing state that receives each row's missing mass. Rows
/// must have mass <= 1; used for solving an already-discounted model.
DiscountedProblem direct_discounted(const FiniteMdp& m, double beta);

/// v(x) = mu(x) * v~(x) on the original states. Throws when v~ at the
/// absorbing state exceeds tol in magnitude.
ValueVector lift_total_value(const DiscountedProblem& dp, std::span<const double> v_tilde,
                             double tol = 1e-9);

struct LiftedAverageSolution {
  double w = 0.0;
  ValueVector h;  // h(ell) == 0
};

/// w = v-(ell), h(x) = mu_ell(x) (v-(x) - v-(ell)).
LiftedAverageSolution lift_average_solution(const DiscountedProblem& dp,
                                            std::span<const double> v_bar);

}  // namespace mdpr
