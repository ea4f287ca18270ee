#include "linear_system.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace mdpr::detail {
namespace {

bool occupation_ok(const Eigen::VectorXd& t) {
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i]) || t[i] < 1.0 - 1e-9 || t[i] > kOccupationCap) {
      return false;
    }
  }
  return true;
}

std::optional<std::vector<double>> solve_direct(const SparseRows& rows,
                                                std::span<const double> b) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (const auto& t : rows[static_cast<std::size_t>(i)]) {
      a(i, static_cast<Eigen::Index>(t.target)) -= t.mass;
    }
  }
  Eigen::MatrixXd rhs(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    rhs(i, 0) = b[static_cast<std::size_t>(i)];
    rhs(i, 1) = 1.0;
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const Eigen::MatrixXd sol = lu.solve(rhs);
  if (!occupation_ok(sol.col(1))) return std::nullopt;
  std::vector<double> x(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(sol(i, 0))) return std::nullopt;
    x[static_cast<std::size_t>(i)] = sol(i, 0);
  }
  return x;
}

// x_{k+1} = b + M x_k and t_{k+1} = 1 + M t_k from zero.
std::optional<std::vector<double>> solve_neumann(const SparseRows& rows,
                                                 std::span<const double> b) {
  const std::size_t n = rows.size();
  std::vector<double> x(n, 0.0), t(n, 0.0), nx(n), nt(n);
  double prev_inc = INFINITY;
  int stalled = 0;
  for (int iter = 0; iter < 10'000'000; ++iter) {
    double inc = 0.0, inc_t = 0.0, scale = 0.0, tmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double sx = b[i], st = 1.0;
      for (const auto& tr : rows[i]) {
        sx += tr.mass * x[tr.target];
        st += tr.mass * t[tr.target];
      }
      inc = std::max(inc, std::abs(sx - x[i]));
      inc_t = std::max(inc_t, std::abs(st - t[i]));
      scale = std::max(scale, std::abs(sx));
      tmax = std::max(tmax, st);
      nx[i] = sx;
      nt[i] = st;
    }
    x.swap(nx);
    t.swap(nt);
    if (!std::isfinite(tmax) || tmax > kOccupationCap) return std::nullopt;
    if (inc_t >= prev_inc) {
      if (++stalled >= 50) return std::nullopt;
    } else {
      stalled = 0;
    }
    // t's increments dominate x's up to the scale of b, and t's ratio is the
    // contraction estimate.
    const double r = prev_inc > 0 && std::isfinite(prev_inc) ? inc_t / prev_inc : 1.0;
    prev_inc = inc_t;
    if (inc == 0.0 && inc_t == 0.0) return x;
    if (r < 1.0 && inc * r / (1.0 - r) <= 1e-14 * std::max(1.0, scale)) return x;
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::vector<double>> solve_transient(const SparseRows& rows,
                                                   std::span<const double> b) {
  if (rows.size() != b.size()) {
    throw Error(ErrorKind::InvalidArgument, "solve_transient: dimension mismatch");
  }
  if (rows.empty()) return std::vector<double>{};
  if (rows.size() <= kDirectSolveLimit) return solve_direct(rows, b);
  return solve_neumann(rows, b);
}

}  // namespace mdpr::detail
