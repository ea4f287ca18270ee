#include "mdpr/core.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "linear_system.hpp"

namespace mdpr {

double ActionRow::row_mass() const noexcept {
  double s = 0.0;
  for (const auto& t : kernel) s += t.mass;
  return s;
}

FiniteMdp::FiniteMdp(std::vector<std::string> state_labels,
                     std::vector<std::vector<ActionRow>> rows)
    : labels_(std::move(state_labels)), rows_(std::move(rows)) {
  if (labels_.size() != rows_.size()) {
    throw Error(ErrorKind::InvalidArgument,
                "FiniteMdp: " + std::to_string(labels_.size()) + " state labels but " +
                    std::to_string(rows_.size()) + " action lists");
  }
  std::unordered_set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) {
      throw Error(ErrorKind::InvalidArgument, "FiniteMdp: duplicate state label '" + l + "'");
    }
  }
  const std::size_t n = labels_.size();
  for (std::size_t x = 0; x < n; ++x) {
    for (auto& r : rows_[x]) {
      auto& k = r.kernel;
      for (const auto& t : k) {
        if (t.target >= n) {
          throw Error(ErrorKind::InvalidArgument,
                      "FiniteMdp: transition from '" + labels_[x] + "' targets index " +
                          std::to_string(t.target) + " out of range");
        }
      }
      std::stable_sort(k.begin(), k.end(),
                       [](const Transition& a, const Transition& b) { return a.target < b.target; });
      std::vector<Transition> merged;
      merged.reserve(k.size());
      for (const auto& t : k) {
        if (!merged.empty() && merged.back().target == t.target) {
          merged.back().mass += t.mass;
        } else {
          merged.push_back(t);
        }
      }
      k = std::move(merged);
    }
  }
}

std::size_t FiniteMdp::max_actions() const noexcept {
  std::size_t m = 0;
  for (const auto& r : rows_) m = std::max(m, r.size());
  return m;
}

std::optional<std::size_t> FiniteMdp::find_state(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t FiniteMdp::state_index(const std::string& label) const {
  if (auto i = find_state(label)) return *i;
  throw Error(ErrorKind::InvalidArgument, "no such state: '" + label + "'");
}

bool FiniteMdp::is_row_stochastic(double tol) const {
  for (const auto& state_rows : rows_) {
    for (const auto& r : state_rows) {
      if (std::abs(r.row_mass() - 1.0) > tol) return false;
    }
  }
  return true;
}

bool operator==(const FiniteMdp& a, const FiniteMdp& b) {
  return a.labels_ == b.labels_ && a.rows_ == b.rows_;
}

void StationaryPolicy::check_against(const FiniteMdp& m) const {
  if (choice_.size() != m.num_states()) {
    throw Error(ErrorKind::InvalidArgument, "policy has " + std::to_string(choice_.size()) +
                                                " entries for " + std::to_string(m.num_states()) +
                                                " states");
  }
  for (std::size_t x = 0; x < choice_.size(); ++x) {
    if (choice_[x] >= m.num_actions(x)) {
      throw Error(ErrorKind::InvalidArgument,
                  "policy picks action " + std::to_string(choice_[x]) + " at state '" +
                      m.state_label(x) + "' which has " + std::to_string(m.num_actions(x)));
    }
  }
}

ModelDiagnostics validate_model(const FiniteMdp& m) {
  ModelDiagnostics d;
  for (std::size_t x = 0; x < m.num_states(); ++x) {
    if (m.num_actions(x) == 0) {
      d.violations.push_back({x, std::nullopt, "empty action set"});
      continue;
    }
    for (std::size_t a = 0; a < m.num_actions(x); ++a) {
      const auto& r = m.row(x, a);
      if (!std::isfinite(r.cost)) {
        d.violations.push_back({x, a, "non-finite cost"});
      } else if (r.cost < 0.0) {
        d.violations.push_back({x, a, "negative cost"});
      }
      bool mass_ok = true;
      for (const auto& t : r.kernel) {
        if (!std::isfinite(t.mass)) {
          d.violations.push_back({x, a, "non-finite mass"});
          mass_ok = false;
        } else if (t.mass < 0.0) {
          d.violations.push_back({x, a, "negative mass"});
          mass_ok = false;
        }
      }
      if (mass_ok) d.sup_row_mass = std::max(d.sup_row_mass, r.row_mass());
    }
  }
  return d;
}

KernelSplit::KernelSplit(const FiniteMdp& m) {
  const std::size_t n = m.num_states();
  alpha_.resize(n);
  p_.resize(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (const auto& r : m.actions(x)) {
      const double alpha = r.row_mass();
      alpha_[x].push_back(alpha);
      std::vector<Transition> p;
      if (alpha > 0.0) {
        p.reserve(r.kernel.size());
        for (const auto& t : r.kernel) p.push_back({t.target, t.mass / alpha});
      }
      p_[x].push_back(std::move(p));
    }
  }
}

const std::vector<Transition>& KernelSplit::p(std::size_t x, std::size_t a) const {
  if (!has_p(x, a)) {
    throw Error(ErrorKind::InvalidArgument, "p undefined on a row with zero mass");
  }
  return p_.at(x).at(a);
}

ValueVector policy_cost(const FiniteMdp& m, const StationaryPolicy& phi) {
  phi.check_against(m);
  ValueVector c(m.num_states());
  for (std::size_t x = 0; x < c.size(); ++x) c[x] = m.cost(x, phi[x]);
  return c;
}

namespace {

void check_dim(const FiniteMdp& m, std::span<const double> u) {
  if (u.size() != m.num_states()) {
    throw Error(ErrorKind::InvalidArgument, "vector has " + std::to_string(u.size()) +
                                                " entries for " + std::to_string(m.num_states()) +
                                                " states");
  }
}

}  // namespace

ValueVector apply_kernel(const FiniteMdp& m, const StationaryPolicy& phi,
                         std::span<const double> u) {
  phi.check_against(m);
  check_dim(m, u);
  ValueVector out(m.num_states(), 0.0);
  for (std::size_t x = 0; x < out.size(); ++x) {
    double s = 0.0;
    for (const auto& t : m.row(x, phi[x]).kernel) s += u[t.target] * t.mass;
    out[x] = s;
  }
  return out;
}

ValueVector taboo_apply(const FiniteMdp& m, const StationaryPolicy& phi, std::size_t ell,
                        std::span<const double> u) {
  if (ell >= m.num_states()) {
    throw Error(ErrorKind::InvalidArgument, "no such state: index " + std::to_string(ell));
  }
  phi.check_against(m);
  check_dim(m, u);
  ValueVector out(m.num_states(), 0.0);
  for (std::size_t x = 0; x < out.size(); ++x) {
    double s = 0.0;
    for (const auto& t : m.row(x, phi[x]).kernel) {
      if (t.target != ell) s += u[t.target] * t.mass;
    }
    out[x] = s;
  }
  return out;
}

ValueVector policy_total_cost(const FiniteMdp& m, const StationaryPolicy& phi) {
  const ValueVector c = policy_cost(m, phi);
  detail::SparseRows rows(m.num_states());
  for (std::size_t x = 0; x < rows.size(); ++x) rows[x] = m.row(x, phi[x]).kernel;
  auto v = detail::solve_transient(rows, c);
  if (!v) throw Error(ErrorKind::NotTransient, "policy not transient");
  return *std::move(v);
}

FiniteMdp taboo_model(const FiniteMdp& m, std::size_t ell) {
  if (ell >= m.num_states()) {
    throw Error(ErrorKind::InvalidArgument, "no such state: index " + std::to_string(ell));
  }
  std::vector<std::vector<ActionRow>> rows(m.num_states());
  for (std::size_t x = 0; x < m.num_states(); ++x) {
    for (const auto& r : m.actions(x)) {
      ActionRow nr{r.label, {}, r.cost};
      for (const auto& t : r.kernel) {
        if (t.target != ell) nr.kernel.push_back(t);
      }
      rows[x].push_back(std::move(nr));
    }
  }
  return FiniteMdp(m.state_labels(), std::move(rows));
}

double sup_norm(std::span<const double> f) {
  double s = 0.0;
  for (double v : f) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace mdpr
