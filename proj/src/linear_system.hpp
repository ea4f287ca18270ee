#pragma once

// Solver for (I - M) x = b with M >= 0 entrywise, used for policy
// evaluation in both the undiscounted (M = Q_phi) and discounted
// (M = beta * P_phi) settings.

#include <optional>
#include <span>
#include <vector>

#include "mdpr/core.hpp"

namespace mdpr::detail {

using SparseRows = std::vector<std::vector<Transition>>;

/// Above this many states the dense LU path is replaced by Neumann iteration.
inline constexpr std::size_t kDirectSolveLimit = 2000;

/// Occupation sums larger than this are treated as divergence.
inline constexpr double kOccupationCap = 1e12;

/// Returns x = sum_n M^n b, or nullopt when that series diverges, i.e. the
/// spectral radius of M is not below 1. Transience is decided by solving
/// (I - M) t = 1 alongside: for nonnegative M a solution t >= 1 exists iff
/// the series converges.
std::optional<std::vector<double>> solve_transient(const SparseRows& rows,
                                                   std::span<const double> b);

}  // namespace mdpr::detail
