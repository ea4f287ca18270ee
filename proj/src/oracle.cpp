#include "mdpr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "linear_system.hpp"

namespace mdpr {

PolicyRange::iterator::iterator(const FiniteMdp* m, bool done) : m_(m), done_(done) {
  if (!done_) current_ = StationaryPolicy::first_actions(*m_);
}

PolicyRange::iterator& PolicyRange::iterator::operator++() {
  std::vector<std::size_t> c = current_.choices();
  std::size_t x = c.size();
  while (x > 0) {
    --x;
    if (++c[x] < m_->num_actions(x)) {
      current_ = StationaryPolicy(std::move(c));
      return *this;
    }
    c[x] = 0;
  }
  done_ = true;
  current_ = StationaryPolicy();
  return *this;
}

std::size_t count_policies(const FiniteMdp& m) {
  std::size_t total = 1;
  for (std::size_t x = 0; x < m.num_states(); ++x) {
    const std::size_t k = m.num_actions(x);
    if (k == 0) return 0;
    if (total > std::numeric_limits<std::size_t>::max() / k) {
      return std::numeric_limits<std::size_t>::max();
    }
    total *= k;
  }
  return total;
}

PolicyRange enumerate_policies(const FiniteMdp& m, std::size_t cap) {
  const std::size_t count = count_policies(m);
  if (count > cap) throw Error(ErrorKind::InvalidArgument, "instance too large for oracle");
  return PolicyRange(m, count);
}

ValueVector exact_total_cost(const FiniteMdp& m, const StationaryPolicy& phi) {
  return policy_total_cost(m, phi);
}

double exact_average_cost(const FiniteMdp& m, const StationaryPolicy& phi, std::size_t ell) {
  if (ell >= m.num_states()) {
    throw Error(ErrorKind::InvalidArgument, "no such state: index " + std::to_string(ell));
  }
  phi.check_against(m);
  if (!m.is_row_stochastic(1e-9)) {
    throw Error(ErrorKind::InvalidArgument, "exact_average_cost: q is not row-stochastic");
  }
  const std::size_t n = m.num_states();
  detail::SparseRows rows(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (const auto& t : m.row(x, phi[x]).kernel) {
      if (t.target != ell) rows[x].push_back(t);
    }
  }
  const ValueVector c = policy_cost(m, phi);
  const ValueVector ones(n, 1.0);
  const auto cycle_cost = detail::solve_transient(rows, c);
  const auto cycle_len = detail::solve_transient(rows, ones);
  if (!cycle_cost || !cycle_len) {
    throw Error(ErrorKind::NotTransient, "ell not reached under phi");
  }
  return (*cycle_cost)[ell] / (*cycle_len)[ell];
}

OracleResult brute_force_optimum(const FiniteMdp& m, const Criterion& criterion, std::size_t cap,
                                 bool keep_table) {
  OracleResult res;
  if (keep_table) res.per_policy.emplace();
  const auto range = enumerate_policies(m, cap);

  if (const auto* avg = std::get_if<AverageCriterion>(&criterion)) {
    double best = INFINITY;
    for (const auto& phi : range) {
      const double w = exact_average_cost(m, phi, avg->ell);
      ++res.policies_enumerated;
      if (keep_table) res.per_policy->push_back({w});
      if (w < best) {
        best = w;
        res.best_policy = phi;
      }
    }
    res.best_value = {best};
    return res;
  }

  ValueVector best(m.num_states(), INFINITY);
  std::vector<ValueVector> values;
  std::vector<StationaryPolicy> policies;
  for (const auto& phi : range) {
    ValueVector v = exact_total_cost(m, phi);
    ++res.policies_enumerated;
    for (std::size_t x = 0; x < v.size(); ++x) best[x] = std::min(best[x], v[x]);
    if (keep_table) res.per_policy->push_back(v);
    values.push_back(std::move(v));
    policies.push_back(phi);
  }
  res.best_value = best;
  res.single_policy_attains = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    bool attains = true;
    for (std::size_t x = 0; x < best.size() && attains; ++x) {
      attains = values[i][x] <= best[x] + 1e-9 * std::max(1.0, std::abs(best[x]));
    }
    if (attains) {
      res.best_policy = policies[i];
      res.single_policy_attains = true;
      break;
    }
  }
  if (!res.single_policy_attains && !policies.empty()) res.best_policy = policies.front();
  return res;
}

}  // namespace mdpr
