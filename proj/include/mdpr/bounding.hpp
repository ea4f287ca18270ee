#pragma once

// Weight functions for transient and hitting-time bounded models.
//
// mu is the smallest function with mu >= V + Q_a mu for every action a,
// obtained as the monotone limit of u_n = U u_{n-1}, u_0 = 0, where
//   U u(x) = max_a [ V(x) + sum_y u(y) q({y} | x, a) ].
// mu_ell is the same construction with V = 1 on the kernel that has the
// mass into ell removed.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mdpr/core.hpp"

namespace mdpr {

enum class WeightRole { V, Mu, MuEll };

struct WeightFunction {
  ValueVector values;
  WeightRole role = WeightRole::V;

  /// Unit weight, the default V.
  static WeightFunction ones(std::size_t n, WeightRole role = WeightRole::V) {
    return {ValueVector(n, 1.0), role};
  }
  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t x) const { return values.at(x); }
};

/// sup_x |f(x)| / w(x).
double v_norm(std::span<const double> f, const WeightFunction& w);

struct BoundOptions {
  /// Stop once u_n <= mu <= (1 + eps) u_n is certified with eps <= tol, or
  /// the increment reaches the rounding floor of u_n.
  double tol = 1e-10;
  std::size_t max_iter = 1'000'000;
  /// Divergence when sup u_n / V exceeds this.
  double divergence_cap = 1e12;
  /// Divergence when the V-norm increment fails to shrink this many times in a row.
  std::size_t stall_window = 50;
  /// Keep every iterate u_0, u_1, ... for contraction_diagnostics().
  bool record_trace = false;
  /// Recording stops after this many iterates.
  std::size_t max_trace = 100'000;
};

struct BoundReport {
  WeightFunction weight;
  /// (1 + tol) * sup_x weight(x) / V(x).
  double k_hat = 1.0;
  /// Only for mu_ell: sup over x != ell, without the (1 + tol) factor.
  std::optional<double> k_minus;
  std::size_t iterations = 0;
  /// Bound on ||mu - u_N||_V at stopping; the last increment when the
  /// iteration failed.
  double residual = 0.0;
  /// Fixed-point defect ||U mu - mu||_V of the returned weight.
  double fixed_point_defect = 0.0;
  bool certified = false;
  std::string message;
  std::vector<ValueVector> trace;
};

/// Fixed-point iteration for mu. On success the returned weight is the last
/// iterate u_N scaled up by (1 + eps), eps = d / (1 - d) with
/// d = ||U u_N - u_N||_V, which makes mu >= V + Q_a mu hold for every action
/// despite stopping early. Failure is reported through certified /
/// message ("Assumption T appears violated"), never thrown.
BoundReport compute_mu(const FiniteMdp& m, const WeightFunction& v,
                       const BoundOptions& opts = {});

/// mu_ell for the marked state ell: compute_mu with V = 1 on taboo_model(m, ell).
/// Because the taboo model sends no mass into ell, the value at ell is the
/// extension max_a [1 + sum_{y != ell} mu_ell(y) q({y} | ell, a)].
BoundReport compute_mu_ell(const FiniteMdp& m, std::size_t ell, const BoundOptions& opts = {});

struct AssumptionCheck {
  bool holds = false;
  double bound_required = 0.0;  // K or K_ell supplied by the caller
  double bound_found = 0.0;     // sup mu / V or sup mu_ell
  BoundReport report;
};

/// sum_n Q_phi^n V <= K V for all stationary phi, via mu.
AssumptionCheck check_assumption_T(const FiniteMdp& m, const WeightFunction& v, double k,
                                   const BoundOptions& opts = {});

/// sum_n (taboo Q_phi)^n 1 <= K_ell for all stationary phi, via mu_ell.
AssumptionCheck check_assumption_HT(const FiniteMdp& m, std::size_t ell, double k_ell,
                                    const BoundOptions& opts = {});

struct ContractionDiagnostics {
  /// ratios[i] = ||u_{i+2} - u_{i+1}|| / ||u_{i+1} - u_i|| in the weighted norm,
  /// for every step whose denominator is above the rounding floor.
  std::vector<double> ratios;
  double modulus = 0.0;  // (K_hat - 1) / K_hat
  double worst = 0.0;
  bool certified = false;
};

/// Successive increment ratios of an iterate trace. The operator U contracts
/// with modulus (K-1)/K in the norm weighted by its own fixed point, so pass
/// the converged weight as `w`. Steps whose denominator falls below
/// 1e-6 * ||u_n||_w are skipped: there the ratio is dominated by rounding.
ContractionDiagnostics contraction_diagnostics(std::span<const ValueVector> trace,
                                               const WeightFunction& w, double k_hat,
                                               double tol = 1e-9);

}  // namespace mdpr
