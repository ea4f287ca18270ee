#include "mdpr/solve.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "linear_system.hpp"

namespace mdpr {
namespace {

double q_value(const ActionRow& r, double beta, std::span<const double> v) {
  double s = 0.0;
  for (const auto& t : r.kernel) s += t.mass * v[t.target];
  return r.cost + beta * s;
}

// One Bellman sweep; returns the greedy action per state as a side effect.
void bellman(const DiscountedProblem& dp, std::span<const double> v, ValueVector& out,
             std::vector<std::size_t>* argmin) {
  const FiniteMdp& m = dp.mdp;
  for (std::size_t x = 0; x < m.num_states(); ++x) {
    double best = INFINITY;
    std::size_t best_a = 0;
    for (std::size_t a = 0; a < m.num_actions(x); ++a) {
      const double q = q_value(m.row(x, a), dp.beta, v);
      if (q < best) {
        best = q;
        best_a = a;
      }
    }
    out[x] = best;
    if (argmin) (*argmin)[x] = best_a;
  }
}

void check_dims(const FiniteMdp& m, std::span<const double> v) {
  if (v.size() != m.num_states()) {
    throw Error(ErrorKind::InvalidArgument, "value vector size does not match the model");
  }
}

double bellman_residual(const DiscountedProblem& dp, std::span<const double> v) {
  ValueVector tv(v.size());
  bellman(dp, v, tv, nullptr);
  double r = 0.0;
  for (std::size_t x = 0; x < v.size(); ++x) r = std::max(r, std::abs(tv[x] - v[x]));
  return r;
}

ValueVector evaluate(const DiscountedProblem& dp, const std::vector<std::size_t>& phi) {
  const FiniteMdp& m = dp.mdp;
  detail::SparseRows rows(m.num_states());
  ValueVector c(m.num_states());
  for (std::size_t x = 0; x < rows.size(); ++x) {
    const auto& r = m.row(x, phi[x]);
    c[x] = r.cost;
    rows[x].reserve(r.kernel.size());
    for (const auto& t : r.kernel) rows[x].push_back({t.target, dp.beta * t.mass});
  }
  auto v = detail::solve_transient(rows, c);
  if (!v) throw Error(ErrorKind::Numeric, "policy evaluation system is singular");
  return *std::move(v);
}

}  // namespace

StationaryPolicy greedy_policy(const DiscountedProblem& dp, std::span<const double> v) {
  check_dims(dp.mdp, v);
  ValueVector out(v.size());
  std::vector<std::size_t> argmin(v.size());
  bellman(dp, v, out, &argmin);
  return StationaryPolicy(std::move(argmin));
}

SolveReport value_iteration(const DiscountedProblem& dp, double tol, std::size_t max_iter) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "value_iteration: tol must be > 0");
  const std::size_t n = dp.mdp.num_states();
  SolveReport rep;
  rep.beta = dp.beta;
  ValueVector v(n, 0.0), next(n);
  const double tail_factor = dp.beta / (1.0 - dp.beta);
  for (std::size_t it = 1; it <= max_iter; ++it) {
    bellman(dp, v, next, nullptr);
    double inc = 0.0;
    for (std::size_t x = 0; x < n; ++x) inc = std::max(inc, std::abs(next[x] - v[x]));
    v.swap(next);
    rep.iterations = it;
    if (!std::isfinite(inc)) break;
    if (inc == 0.0 || tail_factor * inc < tol) {
      rep.converged = true;
      break;
    }
  }
  rep.greedy_policy = greedy_policy(dp, v);
  rep.residual_sup = bellman_residual(dp, v);
  rep.value = std::move(v);
  return rep;
}

SolveReport policy_iteration(const DiscountedProblem& dp, double tol) {
  const FiniteMdp& m = dp.mdp;
  const std::size_t n = m.num_states();
  SolveReport rep;
  rep.beta = dp.beta;

  std::vector<std::size_t> phi(n, 0);
  std::set<std::vector<std::size_t>> seen;
  const std::size_t cap = std::max<std::size_t>(1, n * m.max_actions());
  ValueVector v;
  for (std::size_t round = 1; round <= cap + 1; ++round) {
    v = evaluate(dp, phi);
    rep.iterations = round;
    seen.insert(phi);
    const double scale = std::max(1.0, sup_norm(v));
    bool changed = false;
    for (std::size_t x = 0; x < n; ++x) {
      const double current = q_value(m.row(x, phi[x]), dp.beta, v);
      double best = current;
      std::size_t best_a = phi[x];
      for (std::size_t a = 0; a < m.num_actions(x); ++a) {
        const double q = q_value(m.row(x, a), dp.beta, v);
        if (q < best - 1e-12 * scale) {
          best = q;
          best_a = a;
        }
      }
      if (best_a != phi[x]) {
        phi[x] = best_a;
        changed = true;
      }
    }
    if (!changed || seen.count(phi)) {
      rep.converged = true;
      break;
    }
  }
  rep.greedy_policy = greedy_policy(dp, v);
  rep.residual_sup = bellman_residual(dp, v);
  rep.converged = rep.converged && rep.residual_sup <= std::max(tol, 1e-9 * std::max(1.0, sup_norm(v)));
  rep.value = std::move(v);
  return rep;
}

std::pair<double, double> dcoe_residual(const DiscountedProblem& dp, std::span<const double> v,
                                        const StationaryPolicy& phi) {
  check_dims(dp.mdp, v);
  phi.check_against(dp.mdp);
  double min_form = 0.0, phi_form = 0.0;
  ValueVector tv(v.size());
  bellman(dp, v, tv, nullptr);
  for (std::size_t x = 0; x < v.size(); ++x) {
    min_form = std::max(min_form, std::abs(v[x] - tv[x]));
    phi_form = std::max(phi_form, std::abs(v[x] - q_value(dp.mdp.row(x, phi[x]), dp.beta, v)));
  }
  return {min_form, phi_form};
}

double tcoe_residual(const FiniteMdp& m, std::span<const double> v) {
  check_dims(m, v);
  double r = 0.0;
  for (std::size_t x = 0; x < m.num_states(); ++x) {
    double best = INFINITY;
    for (const auto& row : m.actions(x)) best = std::min(best, q_value(row, 1.0, v));
    r = std::max(r, std::abs(v[x] - best));
  }
  return r;
}

double acoe_residual(const FiniteMdp& m, double w, std::span<const double> h) {
  check_dims(m, h);
  if (!m.is_row_stochastic(1e-9)) {
    throw Error(ErrorKind::InvalidArgument, "acoe_residual: q is not row-stochastic");
  }
  double r = 0.0;
  for (std::size_t x = 0; x < m.num_states(); ++x) {
    double best = INFINITY;
    for (const auto& row : m.actions(x)) best = std::min(best, q_value(row, 1.0, h));
    r = std::max(r, std::abs(w + h[x] - best));
  }
  return r;
}

}  // namespace mdpr
