#include "mdpr/bounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mdpr {
namespace {

void check_weight(const FiniteMdp& m, const WeightFunction& v) {
  if (v.size() != m.num_states()) {
    throw Error(ErrorKind::InvalidArgument, "weight function has " + std::to_string(v.size()) +
                                                " entries for " + std::to_string(m.num_states()) +
                                                " states");
  }
  for (double x : v.values) {
    if (!std::isfinite(x) || x < 1.0) {
      throw Error(ErrorKind::InvalidArgument, "weight function entries must be finite and >= 1");
    }
  }
}

// One sweep of U: out(x) = max_a [V(x) + sum_y u(y) q({y}|x,a)].
void apply_u(const FiniteMdp& m, const WeightFunction& v, const ValueVector& u,
             ValueVector& out) {
  for (std::size_t x = 0; x < m.num_states(); ++x) {
    double best = -INFINITY;
    for (const auto& r : m.actions(x)) {
      double s = 0.0;
      for (const auto& t : r.kernel) s += t.mass * u[t.target];
      best = std::max(best, s);
    }
    out[x] = v[x] + best;
  }
}

double weighted_diff(const ValueVector& a, const ValueVector& b, const WeightFunction& w) {
  double s = 0.0;
  for (std::size_t x = 0; x < a.size(); ++x) s = std::max(s, std::abs(a[x] - b[x]) / w[x]);
  return s;
}

double sup_ratio(const ValueVector& u, const WeightFunction& w) {
  double s = 0.0;
  for (std::size_t x = 0; x < u.size(); ++x) s = std::max(s, u[x] / w[x]);
  return s;
}

// Increments this close to the size of u are rounding noise.
constexpr double kRoundingUlps = 64.0;

}  // namespace

double v_norm(std::span<const double> f, const WeightFunction& w) {
  if (f.size() != w.size()) {
    throw Error(ErrorKind::InvalidArgument, "v_norm: dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) s = std::max(s, std::abs(f[x]) / w[x]);
  return s;
}

BoundReport compute_mu(const FiniteMdp& m, const WeightFunction& v, const BoundOptions& opts) {
  if (!(opts.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "compute_mu: tol must be > 0");
  check_weight(m, v);
  if (const auto d = validate_model(m); !d.valid()) {
    throw Error(ErrorKind::InvalidArgument,
                "compute_mu: invalid model (" + d.violations.front().message + ")");
  }

  const std::size_t n = m.num_states();
  BoundReport rep;
  rep.weight.role = WeightRole::Mu;

  ValueVector u(n, 0.0), next(n, 0.0);
  if (opts.record_trace) rep.trace.push_back(u);

  double prev_inc = INFINITY;
  std::size_t stalled = 0;
  bool converged = false;
  bool diverged = false;
  double inc = INFINITY;

  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    apply_u(m, v, u, next);
    inc = weighted_diff(next, u, v);
    u.swap(next);
    rep.iterations = it;
    if (opts.record_trace && rep.trace.size() < opts.max_trace) rep.trace.push_back(u);

    const double growth = sup_ratio(u, v);
    if (!std::isfinite(growth) || growth > opts.divergence_cap) {
      diverged = true;
      break;
    }
    // inc bounds ||U u_n - u_{n-1}|| from above by one step; once the next
    // defect d < 1, (1 + d/(1-d)) u_n dominates mu and u_n <= mu from below.
    const double eps = inc < 1.0 ? inc / (1.0 - inc) : INFINITY;
    const double floor = kRoundingUlps * std::numeric_limits<double>::epsilon() * growth;
    if (eps <= opts.tol || inc <= floor) {
      rep.residual = std::min(eps, 1.0) * growth;
      converged = true;
      break;
    }
    if (it >= 2) {
      stalled = inc >= prev_inc ? stalled + 1 : 0;
      if (stalled >= opts.stall_window) {
        diverged = true;
        break;
      }
    }
    prev_inc = inc;
  }

  if (!converged) {
    rep.certified = false;
    rep.residual = inc;
    rep.weight.values = u;
    rep.k_hat = INFINITY;
    rep.message = diverged || rep.iterations >= opts.max_iter
                      ? "Assumption T appears violated"
                      : "fixed-point iteration did not converge";
    return rep;
  }

  // Scale the truncated iterate so that mu >= V + Q_a mu holds exactly.
  apply_u(m, v, u, next);
  double defect = 0.0;
  for (std::size_t x = 0; x < n; ++x) defect = std::max(defect, (next[x] - u[x]) / v[x]);
  const double eps = defect / (1.0 - defect);
  for (auto& x : u) x *= 1.0 + eps;

  apply_u(m, v, u, next);
  rep.fixed_point_defect = weighted_diff(next, u, v);
  rep.weight.values = std::move(u);
  rep.k_hat = (1.0 + opts.tol) * sup_ratio(rep.weight.values, v);
  rep.certified = std::isfinite(rep.k_hat);
  return rep;
}

BoundReport compute_mu_ell(const FiniteMdp& m, std::size_t ell, const BoundOptions& opts) {
  if (ell >= m.num_states()) {
    throw Error(ErrorKind::InvalidArgument, "no such state: index " + std::to_string(ell));
  }
  const FiniteMdp taboo = taboo_model(m, ell);
  BoundReport rep = compute_mu(taboo, WeightFunction::ones(m.num_states()), opts);
  rep.weight.role = WeightRole::MuEll;
  if (!rep.certified) {
    rep.message = "Assumption HT appears violated for this ell ('" + m.state_label(ell) + "')";
    return rep;
  }
  double k_minus = 1.0;
  for (std::size_t x = 0; x < m.num_states(); ++x) {
    if (x != ell) k_minus = std::max(k_minus, rep.weight[x]);
  }
  rep.k_minus = k_minus;
  return rep;
}

AssumptionCheck check_assumption_T(const FiniteMdp& m, const WeightFunction& v, double k,
                                   const BoundOptions& opts) {
  if (!(k >= 1.0)) throw Error(ErrorKind::InvalidArgument, "K must be >= 1");
  AssumptionCheck c;
  c.bound_required = k;
  c.report = compute_mu(m, v, opts);
  if (c.report.certified) {
    c.bound_found = sup_ratio(c.report.weight.values, v);
    c.holds = c.bound_found <= k;
  } else {
    c.bound_found = INFINITY;
  }
  return c;
}

AssumptionCheck check_assumption_HT(const FiniteMdp& m, std::size_t ell, double k_ell,
                                    const BoundOptions& opts) {
  if (!(k_ell >= 1.0)) throw Error(ErrorKind::InvalidArgument, "K_ell must be >= 1");
  AssumptionCheck c;
  c.bound_required = k_ell;
  c.report = compute_mu_ell(m, ell, opts);
  if (c.report.certified) {
    c.bound_found = sup_norm(c.report.weight.values);
    c.holds = c.bound_found <= k_ell;
  } else {
    c.bound_found = INFINITY;
  }
  return c;
}

ContractionDiagnostics contraction_diagnostics(std::span<const ValueVector> trace,
                                               const WeightFunction& w, double k_hat,
                                               double tol) {
  if (trace.size() < 3) {
    throw Error(ErrorKind::InvalidArgument, "contraction_diagnostics needs >= 3 iterates");
  }
  if (!(k_hat >= 1.0)) throw Error(ErrorKind::InvalidArgument, "K_hat must be >= 1");
  ContractionDiagnostics d;
  d.modulus = (k_hat - 1.0) / k_hat;
  for (std::size_t i = 1; i + 1 < trace.size(); ++i) {
    const double den = weighted_diff(trace[i], trace[i - 1], w);
    const double floor = 1e-6 * v_norm(trace[i], w);
    if (den <= floor) continue;
    const double r = weighted_diff(trace[i + 1], trace[i], w) / den;
    d.ratios.push_back(r);
    d.worst = std::max(d.worst, r);
  }
  d.certified = d.worst <= d.modulus + tol;
  return d;
}

}  // namespace mdpr
