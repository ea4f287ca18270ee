#include "mdpr/transform.hpp"

#include <cmath>
#include <string>

namespace mdpr {
namespace {

std::string absorbing_label(const FiniteMdp& m) {
  std::string label = "absorbing";
  while (m.find_state(label)) label += "'";
  return label;
}

struct RowBuilder {
  std::vector<Transition> entries;
  double max_defect = 0.0;

  // Clamps tiny negatives, renormalizes when something was clamped.
  std::vector<Transition> finish() {
    double sum = 0.0;
    bool clamped = false;
    for (auto& t : entries) {
      sum += t.mass;
      if (t.mass < 0.0) {
        t.mass = 0.0;
        clamped = true;
      }
    }
    max_defect = std::abs(sum - 1.0);
    std::vector<Transition> out;
    double kept = 0.0;
    for (const auto& t : entries) {
      if (t.mass > 0.0) {
        out.push_back(t);
        kept += t.mass;
      }
    }
    if (clamped && kept > 0.0) {
      for (auto& t : out) t.mass /= kept;
    }
    return out;
  }
};

void check_beta_range(double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "beta must lie in [0, 1), got " + std::to_string(beta));
  }
}

void check_weight_size(const FiniteMdp& m, const WeightFunction& w) {
  if (w.size() != m.num_states()) {
    throw Error(ErrorKind::InvalidArgument, "weight function size does not match the model");
  }
  for (double x : w.values) {
    if (!std::isfinite(x) || x < 1.0) {
      throw Error(ErrorKind::InvalidArgument, "weight function entries must be finite and >= 1");
    }
  }
}

double resolve_beta(const BoundReport& bound, std::optional<double> beta, const char* which) {
  if (!bound.certified) {
    throw Error(ErrorKind::Certification, std::string("weight function is not certified: ") +
                                              bound.message);
  }
  const double lo = min_admissible_beta(bound);
  const double b = beta.value_or(lo);
  if (b < lo) {
    throw Error(ErrorKind::InvalidArgument, std::string("beta below ") + which +
                                                " = " + std::to_string(lo));
  }
  if (b > kMaxBeta) {
    throw Error(ErrorKind::InvalidArgument, "beta above 1 - 1e-6");
  }
  return b;
}

ActionRow absorbing_row() { return ActionRow{"stay", {}, 0.0}; }

}  // namespace

const char* to_string(ReductionKind k) noexcept {
  switch (k) {
    case ReductionKind::HV: return "HV";
    case ReductionKind::HVAG: return "HV-AG";
    case ReductionKind::Direct: return "direct";
  }
  return "?";
}

double min_admissible_beta(const BoundReport& bound) {
  return (bound.k_hat - 1.0) / bound.k_hat;
}

DiscountedProblem hv_transform(const FiniteMdp& m, const WeightFunction& mu, double beta) {
  check_beta_range(beta);
  check_weight_size(m, mu);
  const std::size_t n = m.num_states();
  const std::size_t abs_idx = n;

  DiscountedProblem dp;
  dp.beta = beta;
  dp.absorbing_state = abs_idx;
  dp.weight_used = mu;
  dp.weight_used.role = WeightRole::Mu;
  dp.kind = ReductionKind::HV;

  std::vector<std::vector<ActionRow>> rows(n + 1);
  for (std::size_t x = 0; x < n; ++x) {
    const double denom = beta * mu[x];
    for (const auto& r : m.actions(x)) {
      RowBuilder b;
      double tilted = 0.0;
      for (const auto& t : r.kernel) {
        const double num = mu[t.target] * t.mass;
        if (num == 0.0) continue;
        if (denom == 0.0) {
          throw Error(ErrorKind::InvalidArgument,
                      "beta = 0 is only admissible when every kernel row is empty");
        }
        b.entries.push_back({t.target, num / denom});
        tilted += num / denom;
      }
      const double to_abs = 1.0 - tilted;
      if (to_abs < -kClampTol) {
        throw Error(ErrorKind::InvalidArgument,
                    "mu does not satisfy mu >= V + Q mu at state '" + m.state_label(x) +
                        "' (or beta too small); recompute mu");
      }
      b.entries.push_back({abs_idx, to_abs});
      ActionRow nr{r.label, b.finish(), r.cost / mu[x]};
      dp.max_row_defect = std::max(dp.max_row_defect, b.max_defect);
      rows[x].push_back(std::move(nr));
    }
  }
  std::vector<std::string> labels = m.state_labels();
  labels.push_back(absorbing_label(m));
  rows[abs_idx].push_back(absorbing_row());
  rows[abs_idx].back().kernel.push_back({abs_idx, 1.0});
  dp.mdp = FiniteMdp(std::move(labels), std::move(rows));
  return dp;
}

DiscountedProblem hv_transform(const FiniteMdp& m, const BoundReport& mu,
                               std::optional<double> beta) {
  return hv_transform(m, mu.weight, resolve_beta(mu, beta, "(K-1)/K"));
}

DiscountedProblem hvag_transform(const FiniteMdp& m, std::size_t ell, const WeightFunction& mu_ell,
                                 double beta) {
  check_beta_range(beta);
  check_weight_size(m, mu_ell);
  if (ell >= m.num_states()) {
    throw Error(ErrorKind::InvalidArgument, "no such state: index " + std::to_string(ell));
  }
  const std::size_t n = m.num_states();
  const std::size_t abs_idx = n;

  DiscountedProblem dp;
  dp.beta = beta;
  dp.absorbing_state = abs_idx;
  dp.marked_ell = ell;
  dp.weight_used = mu_ell;
  dp.weight_used.role = WeightRole::MuEll;
  dp.kind = ReductionKind::HVAG;

  std::vector<std::vector<ActionRow>> rows(n + 1);
  for (std::size_t x = 0; x < n; ++x) {
    const double w = mu_ell[x];
    const double denom = beta * w;
    const double to_abs = denom == 0.0 ? (w == 1.0 ? 1.0 : -INFINITY) : 1.0 - (w - 1.0) / denom;
    if (to_abs < -kClampTol) {
      throw Error(ErrorKind::InvalidArgument, "beta below (K_ell-1)/K_ell at state '" +
                                                  m.state_label(x) + "'");
    }
    for (const auto& r : m.actions(x)) {
      RowBuilder b;
      double taboo_integral = 0.0;
      for (const auto& t : r.kernel) {
        if (t.target == ell) continue;
        const double num = mu_ell[t.target] * t.mass;
        if (num == 0.0) continue;
        taboo_integral += num;
        if (denom == 0.0) {
          throw Error(ErrorKind::InvalidArgument,
                      "mu_ell does not satisfy mu_ell >= 1 + taboo Q mu_ell at state '" +
                          m.state_label(x) + "'");
        }
        b.entries.push_back({t.target, num / denom});
      }
      const double surplus = w - 1.0 - taboo_integral;
      const double to_ell = denom == 0.0 ? 0.0 : surplus / denom;
      if (to_ell < -kClampTol) {
        throw Error(ErrorKind::InvalidArgument,
                    "mu_ell does not satisfy mu_ell >= 1 + taboo Q mu_ell at state '" +
                        m.state_label(x) + "'");
      }
      b.entries.push_back({ell, to_ell});
      b.entries.push_back({abs_idx, to_abs});
      auto kernel = b.finish();
      dp.max_row_defect = std::max(dp.max_row_defect, b.max_defect);
      rows[x].push_back(ActionRow{r.label, std::move(kernel), r.cost / w});
    }
  }
  std::vector<std::string> labels = m.state_labels();
  labels.push_back(absorbing_label(m));
  rows[abs_idx].push_back(absorbing_row());
  rows[abs_idx].back().kernel.push_back({abs_idx, 1.0});
  dp.mdp = FiniteMdp(std::move(labels), std::move(rows));
  return dp;
}

DiscountedProblem hvag_transform(const FiniteMdp& m, std::size_t ell, const BoundReport& mu_ell,
                                 std::optional<double> beta) {
  return hvag_transform(m, ell, mu_ell.weight, resolve_beta(mu_ell, beta, "(K_ell-1)/K_ell"));
}

DiscountedProblem direct_discounted(const FiniteMdp& m, double beta) {
  check_beta_range(beta);
  const std::size_t n = m.num_states();
  const std::size_t abs_idx = n;
  DiscountedProblem dp;
  dp.beta = beta;
  dp.absorbing_state = abs_idx;
  dp.weight_used = WeightFunction::ones(n);
  dp.kind = ReductionKind::Direct;

  std::vector<std::vector<ActionRow>> rows(n + 1);
  for (std::size_t x = 0; x < n; ++x) {
    for (const auto& r : m.actions(x)) {
      RowBuilder b;
      b.entries = r.kernel;
      const double missing = 1.0 - r.row_mass();
      if (missing < -kClampTol) {
        throw Error(ErrorKind::InvalidArgument, "row mass above 1 at state '" +
                                                    m.state_label(x) + "'");
      }
      b.entries.push_back({abs_idx, missing});
      auto kernel = b.finish();
      dp.max_row_defect = std::max(dp.max_row_defect, b.max_defect);
      rows[x].push_back(ActionRow{r.label, std::move(kernel), r.cost});
    }
  }
  std::vector<std::string> labels = m.state_labels();
  labels.push_back(absorbing_label(m));
  rows[abs_idx].push_back(absorbing_row());
  rows[abs_idx].back().kernel.push_back({abs_idx, 1.0});
  dp.mdp = FiniteMdp(std::move(labels), std::move(rows));
  return dp;
}

ValueVector lift_total_value(const DiscountedProblem& dp, std::span<const double> v_tilde,
                             double tol) {
  if (dp.kind == ReductionKind::HVAG) {
    throw Error(ErrorKind::InvalidArgument, "lift_total_value needs an HV problem");
  }
  if (v_tilde.size() != dp.mdp.num_states()) {
    throw Error(ErrorKind::InvalidArgument, "value vector size does not match the problem");
  }
  if (std::abs(v_tilde[dp.absorbing_state]) > tol) {
    throw Error(ErrorKind::InvalidArgument, "absorbing state has nonzero value");
  }
  ValueVector v(dp.num_original_states());
  for (std::size_t x = 0; x < v.size(); ++x) v[x] = dp.weight_used[x] * v_tilde[x];
  return v;
}

LiftedAverageSolution lift_average_solution(const DiscountedProblem& dp,
                                            std::span<const double> v_bar) {
  if (dp.kind != ReductionKind::HVAG || !dp.marked_ell) {
    throw Error(ErrorKind::InvalidArgument, "lift_average_solution needs an HV-AG problem");
  }
  if (v_bar.size() != dp.mdp.num_states()) {
    throw Error(ErrorKind::InvalidArgument, "value vector size does not match the problem");
  }
  const std::size_t ell = *dp.marked_ell;
  LiftedAverageSolution s;
  s.w = v_bar[ell];
  s.h.resize(dp.num_original_states());
  for (std::size_t x = 0; x < s.h.size(); ++x) {
    s.h[x] = x == ell ? 0.0 : dp.weight_used[x] * (v_bar[x] - s.w);
  }
  return s;
}

}  // namespace mdpr
