// Acceptance suite: one PASS/FAIL line per criterion.
//
// Exit status is 0 when every criterion passes, or fails only in the way
// recorded in kKnownFailures. A known failure that starts passing is also
// reported as a regression so the record gets updated.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mdpr/bounding.hpp"
#include "mdpr/model_file.hpp"
#include "mdpr/models.hpp"
#include "mdpr/oracle.hpp"
#include "mdpr/solve.hpp"
#include "mdpr/transform.hpp"
#include "test_support.hpp"

namespace {

using namespace mdpr;

constexpr std::uint64_t kTotalSeedBase = 1000;
constexpr std::uint64_t kAverageSeedBase = 2000;
constexpr int kSuiteSize = 100;

// Criterion 4(b) and 7 compare against the closed-form hitting-time bound
// 375 for the inventory fixture, but the actual supremum is 1221.25. Only
// this exact failure reason is tolerated.
const std::map<int, std::string> kKnownFailures = {
    {4, "(b) sup mu_ell exceeds the bound"},
    {7, "Assumption T with K = 375 fails"},
};

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::vector<std::string> reasons;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      reasons.push_back(what);
      pass = false;
    }
  }
};

// Every bound computed by the suite is kept for the contraction criterion.
struct BoundRun {
  std::string name;
  BoundReport report;
};
std::vector<BoundRun> g_runs;

BoundOptions traced(double tol = 1e-10) {
  BoundOptions o;
  o.tol = tol;
  o.record_trace = true;
  return o;
}

const BoundReport& mu_of(const std::string& name, const FiniteMdp& m, const WeightFunction& v,
                         double tol = 1e-10) {
  g_runs.push_back({name, compute_mu(m, v, traced(tol))});
  return g_runs.back().report;
}

const BoundReport& mu_ell_of(const std::string& name, const FiniteMdp& m, std::size_t ell,
                             double tol = 1e-10) {
  g_runs.push_back({name, compute_mu_ell(m, ell, traced(tol))});
  return g_runs.back().report;
}

// Rewritten problems kept for the stochasticity criterion.
struct Rewrite {
  std::string name;
  const FiniteMdp* m;
  std::optional<std::size_t> ell;
  BoundReport bound;
};
std::vector<Rewrite> g_rewrites;
std::vector<FiniteMdp> g_models;

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

Outcome remark1_golden() {
  Outcome o;
  const auto spec = fixture_remark1();
  g_models.push_back(build_remark1_mdp(spec));
  const auto& m = g_models.back();
  const std::size_t ell = m.num_states() - 1;
  const auto& r = mu_ell_of("remark1", m, ell, 1e-12);
  o.require(r.certified, "mu_ell not certified");
  if (!r.certified) return o;
  g_rewrites.push_back({"remark1", &m, ell, r});

  double err = std::abs(r.weight[0] - 1.0);
  err = std::max(err, std::abs(r.weight[ell] - (std::sqrt(5.0) + 1.0) / 2.0));
  for (std::size_t i = 0; i < spec.interior_grid.size(); ++i) {
    err = std::max(err, std::abs(r.weight[i + 1] - 1.0 / (1.0 - spec.interior_grid[i])));
  }
  const double gap = r.weight[ell - 1] - r.weight[ell];
  o.detail << "max error " << err << ", gap " << gap;
  o.require(err <= 1e-10, "golden values off");
  o.require(gap >= 0.9, "gap below 0.9");
  return o;
}

Outcome hv_total_suite() {
  Outcome o;
  double worst_value = 0.0, worst_tcoe = 0.0;
  int certified = 0;
  for (int i = 0; i < kSuiteSize; ++i) {
    g_models.push_back(testing::random_transient_mdp(kTotalSeedBase + i));
    const auto& m = g_models.back();
    const auto v = WeightFunction::ones(m.num_states());
    const auto& bound = mu_of("total#" + std::to_string(i), m, v);
    const auto check = check_assumption_T(m, v, bound.k_hat);
    if (!bound.certified || !check.holds) {
      o.require(false, "instance " + std::to_string(i) + " not certified");
      continue;
    }
    ++certified;
    g_rewrites.push_back({"total#" + std::to_string(i), &m, std::nullopt, bound});
    const auto dp = hv_transform(m, bound);
    const auto sol = policy_iteration(dp);
    const auto lifted = lift_total_value(dp, sol.value);
    const auto orc = brute_force_optimum(m, TotalCriterion{});
    worst_value = std::max(worst_value, max_abs_diff(lifted, orc.best_value));
    worst_tcoe = std::max(worst_tcoe, tcoe_residual(m, lifted));
  }
  o.detail << certified << "/" << kSuiteSize << " certified, max |mu*v~ - oracle| " << worst_value
           << ", max tcoe " << worst_tcoe;
  o.require(worst_value <= 1e-7, "value mismatch");
  o.require(worst_tcoe <= 1e-8, "tcoe above 1e-8");
  return o;
}

Outcome hvag_average_suite() {
  Outcome o;
  double worst_w = 0.0, worst_acoe = 0.0, worst_h_ell = 0.0;
  int certified = 0;
  for (int i = 0; i < kSuiteSize; ++i) {
    g_models.push_back(testing::random_hitting_mdp(kAverageSeedBase + i));
    const auto& m = g_models.back();
    const std::size_t ell = 0;
    const auto& bound = mu_ell_of("average#" + std::to_string(i), m, ell);
    const auto check = check_assumption_HT(m, ell, bound.k_hat);
    if (!bound.certified || !check.holds) {
      o.require(false, "instance " + std::to_string(i) + " not certified");
      continue;
    }
    ++certified;
    g_rewrites.push_back({"average#" + std::to_string(i), &m, ell, bound});
    const auto dp = hvag_transform(m, ell, bound);
    const auto sol = policy_iteration(dp);
    const auto lifted = lift_average_solution(dp, sol.value);
    const auto orc = brute_force_optimum(m, AverageCriterion{ell});
    worst_w = std::max(worst_w, std::abs(lifted.w - orc.best_value.front()));
    worst_acoe = std::max(worst_acoe, acoe_residual(m, lifted.w, lifted.h));
    worst_h_ell = std::max(worst_h_ell, std::abs(lifted.h[ell]));
  }
  o.detail << certified << "/" << kSuiteSize << " certified, max |w - oracle| " << worst_w
           << ", max acoe " << worst_acoe << ", max |h(ell)| " << worst_h_ell;
  o.require(worst_w <= 1e-6, "w mismatch");
  o.require(worst_acoe <= 1e-8, "acoe above 1e-8");
  o.require(worst_h_ell == 0.0, "h(ell) nonzero");
  return o;
}

Outcome inventory_end_to_end() {
  Outcome o;
  const auto spec = load_model(testing::fixture_path("fix_inv.json")).inventory.value();
  const auto d = check_assumption_D(spec);
  const double bound = k_ell_bound(spec);
  o.detail << "(a) gamma " << d.gamma << ", bound " << bound;
  o.require(d.holds && d.gamma == 0.2 && bound == 375.0, "(a) gamma/bound");

  g_models.push_back(build_inventory_mdp(spec));
  const auto& m = g_models.back();
  const std::size_t ell = m.state_index(kLostSaleLabel);
  const auto& mu = mu_ell_of("inventory", m, ell);
  o.require(mu.certified, "mu_ell not certified");
  if (!mu.certified) return o;
  g_rewrites.push_back({"inventory", &m, ell, mu});
  const double sup_mu = sup_norm(mu.weight.values);
  o.detail << "; (b) sup mu_ell " << sup_mu;
  o.require(sup_mu <= bound, "(b) sup mu_ell exceeds the bound");

  const auto dp = hvag_transform(m, ell, mu);
  const auto sol = policy_iteration(dp);
  const auto lifted = lift_average_solution(dp, sol.value);
  const auto orc = brute_force_optimum(m, AverageCriterion{ell});
  o.detail << "; (c) w " << lifted.w << " vs oracle " << orc.best_value.front() << " over "
           << orc.policies_enumerated << " policies";
  o.require(orc.policies_enumerated == 729, "(c) policy count");
  o.require(std::abs(lifted.w - orc.best_value.front()) <= 1e-6, "(c) w mismatch");

  StationaryPolicy phi(std::vector<std::size_t>(sol.greedy_policy.choices().begin(),
                                                sol.greedy_policy.choices().end() - 1));
  const auto sim = simulate_policy(m, phi, 0, 100000, 20, 1);
  o.detail << "; (d) simulated " << sim.mean << " +- " << sim.standard_error;
  o.require(std::abs(sim.mean - lifted.w) <= 3.0 * sim.standard_error, "(d) simulation off");
  return o;
}

Outcome stochasticity() {
  Outcome o;
  // Fixture rewrites not already produced by the other criteria.
  for (const char* name : {"fix_a.json", "two_state_average.json"}) {
    g_models.push_back(load_model(testing::fixture_path(name)).mdp);
    const auto& m = g_models.back();
    if (m.is_row_stochastic()) {
      g_rewrites.push_back({name, &m, 0, mu_ell_of(name, m, 0)});
    } else {
      g_rewrites.push_back({name, &m, std::nullopt,
                            mu_of(name, m, WeightFunction::ones(m.num_states()))});
    }
  }
  double worst_defect = 0.0, worst_entry = 0.0;
  std::size_t problems = 0, skipped = 0;
  for (const auto& rw : g_rewrites) {
    const double lo = min_admissible_beta(rw.bound);
    for (const double beta : {lo, 0.99}) {
      // 0.99 lies below the admissible range when K_hat > 100.
      if (beta < lo) {
        ++skipped;
        continue;
      }
      const auto dp = rw.ell ? hvag_transform(*rw.m, *rw.ell, rw.bound, beta)
                             : hv_transform(*rw.m, rw.bound, beta);
      const auto s = testing::row_stats(dp.mdp);
      worst_defect = std::max(worst_defect, s.max_defect);
      worst_entry = std::min(worst_entry, s.min_entry);
      ++problems;
    }
  }
  o.detail << problems << " rewritten problems (" << skipped
           << " with beta_min > 0.99 checked at beta_min only), max |row sum - 1| " << worst_defect
           << ", min entry " << worst_entry;
  o.require(worst_defect <= 1e-12, "row sum defect");
  o.require(worst_entry >= 0.0, "negative entry");
  return o;
}

Outcome contraction() {
  Outcome o;
  std::size_t checked = 0, ratios = 0;
  double worst_margin = -INFINITY;
  for (const auto& run : g_runs) {
    if (!run.report.certified || run.report.trace.size() < 3) continue;
    const auto d = contraction_diagnostics(run.report.trace, run.report.weight, run.report.k_hat);
    ++checked;
    ratios += d.ratios.size();
    worst_margin = std::max(worst_margin, d.worst - d.modulus);
    o.require(d.certified, run.name + " ratio " + std::to_string(d.worst) + " > modulus " +
                               std::to_string(d.modulus));
  }
  o.detail << checked << " runs, " << ratios << " ratios, max (r_n - modulus) " << worst_margin;
  return o;
}

Outcome lost_sale_variant() {
  Outcome o;
  const auto doc = load_model(testing::fixture_path("fix_inv_lost_sale.json"));
  g_models.push_back(doc.mdp);
  const auto& m = g_models.back();
  const auto v = WeightFunction::ones(m.num_states());
  const double k = k_ell_bound(*doc.inventory);
  const auto& mu = mu_of("lost-sale", m, v);
  const auto check = check_assumption_T(m, v, k);
  o.detail << "sup mu " << check.bound_found << " vs K " << k;
  o.require(check.holds, "Assumption T with K = 375 fails");
  if (!mu.certified) {
    o.require(false, "mu not certified");
    return o;
  }
  g_rewrites.push_back({"lost-sale", &m, std::nullopt, mu});
  const auto dp = hv_transform(m, mu);
  const auto sol = policy_iteration(dp);
  const auto lifted = lift_total_value(dp, sol.value);
  const double tcoe = tcoe_residual(m, lifted);
  const auto orc = brute_force_optimum(m, TotalCriterion{});
  const double diff = max_abs_diff(lifted, orc.best_value);
  o.detail << "; tcoe " << tcoe << ", max |v - oracle| " << diff << " over "
           << orc.policies_enumerated << " policies";
  o.require(tcoe <= 1e-8, "tcoe above 1e-8");
  o.require(orc.policies_enumerated == 729 && diff <= 1e-7, "oracle mismatch");
  return o;
}

struct AcceptanceCriterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  // Criteria 5 and 6 inspect the runs of the others, so they go last.
  const std::vector<AcceptanceCriterion> criteria = {
      {1, "golden-ratio marked-state values", 1.0, remark1_golden},
      {2, "HV total-cost equivalence", 30.0, hv_total_suite},
      {3, "HV-AG average-cost equivalence", 60.0, hvag_average_suite},
      {4, "Inventory end-to-end", 60.0, inventory_end_to_end},
      {7, "Lost-sale total-cost variant", 60.0, lost_sale_variant},
      {5, "Transformation stochasticity", 60.0, stochasticity},
      {6, "Contraction certificate", 60.0, contraction},
  };
  g_runs.reserve(1000);
  g_rewrites.reserve(1000);
  g_models.reserve(1000);

  int unexpected = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.require(secs < c.budget_s, "over time budget");
    const auto known = kKnownFailures.find(c.id);
    std::string why;
    for (const auto& r : out.reasons) why += (why.empty() ? " | " : "; ") + r;
    std::printf("CRITERION %d %s: %s (%.3f s) %s%s\n", c.id, c.name, out.pass ? "PASS" : "FAIL",
                secs, out.detail.str().c_str(), why.c_str());
    const bool as_recorded =
        known == kKnownFailures.end()
            ? out.pass
            : out.reasons == std::vector<std::string>(1, known->second);
    if (!as_recorded) ++unexpected;
  }
  std::printf("%s\n", unexpected == 0 ? "acceptance: outcomes as recorded"
                                      : "acceptance: unexpected outcome");
  return unexpected == 0 ? 0 : 1;
}
