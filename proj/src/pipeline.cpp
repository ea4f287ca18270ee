#include "mdpr/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

#include "json.hpp"
#include "mdpr/bounding.hpp"
#include "mdpr/oracle.hpp"
#include "mdpr/solve.hpp"
#include "mdpr/transform.hpp"
#include "mdpr/version.hpp"

namespace mdpr {
namespace {

using Json = nlohmann::ordered_json;

// Thresholds for the verification checks embedded in reports.
constexpr double kRowSumTol = 1e-12;
constexpr double kTcoeTol = 1e-8;
constexpr double kAcoeTol = 1e-8;
constexpr double kOracleTotalTol = 1e-7;
constexpr double kOracleAverageTol = 1e-6;
constexpr double kGoldenTol = 1e-10;
constexpr double kGapThreshold = 0.9;
constexpr double kContractionSlack = 1e-9;

struct Checks {
  Json list = Json::array();
  bool all_pass = true;

  void add(const std::string& id, double value, double threshold, bool pass,
           const char* relation = "<=") {
    list.push_back({{"id", id}, {"value", value}, {"relation", relation},
                    {"threshold", threshold}, {"pass", pass}});
    all_pass = all_pass && pass;
  }
  void holds(const std::string& id, bool pass) {
    list.push_back({{"id", id}, {"pass", pass}});
    all_pass = all_pass && pass;
  }
  void at_most(const std::string& id, double value, double threshold) {
    add(id, value, threshold, value <= threshold);
  }
  void at_least(const std::string& id, double value, double threshold) {
    add(id, value, threshold, value >= threshold, ">=");
  }
};

Json table(const FiniteMdp& m, std::span<const double> values) {
  Json t = Json::object();
  for (std::size_t x = 0; x < values.size() && x < m.num_states(); ++x) {
    t[m.state_label(x)] = values[x];
  }
  return t;
}

Json policy_table(const FiniteMdp& m, const StationaryPolicy& phi) {
  Json t = Json::object();
  for (std::size_t x = 0; x < m.num_states() && x < phi.size(); ++x) {
    t[m.state_label(x)] = m.row(x, phi[x]).label;
  }
  return t;
}

StationaryPolicy restrict_policy(const StationaryPolicy& phi, std::size_t n) {
  return StationaryPolicy(
      std::vector<std::size_t>(phi.choices().begin(), phi.choices().begin() + static_cast<long>(n)));
}

BoundOptions bound_options(const RunOptions& o) {
  BoundOptions b;
  b.tol = o.tol;
  b.record_trace = true;
  return b;
}

Json bound_json(const FiniteMdp& m, const BoundReport& r, Checks& checks) {
  Json j;
  j["certified"] = r.certified;
  if (r.certified) j["K_hat"] = r.k_hat;
  if (r.k_minus) j["K_minus"] = *r.k_minus;
  j["iterations"] = r.iterations;
  j["residual"] = r.residual;
  j["fixed_point_defect"] = r.fixed_point_defect;
  if (!r.message.empty()) j["message"] = r.message;
  if (r.certified) j["weight"] = table(m, r.weight.values);
  if (r.certified && r.trace.size() >= 3) {
    const auto d = contraction_diagnostics(r.trace, r.weight, r.k_hat, kContractionSlack);
    j["contraction"] = {{"modulus", d.modulus}, {"worst_ratio", d.worst},
                        {"ratios_checked", d.ratios.size()}, {"certified", d.certified}};
    checks.at_most("contraction", d.worst, d.modulus + kContractionSlack);
  }
  return j;
}

SolveReport solve_with(const DiscountedProblem& dp, const RunOptions& o) {
  return o.method == SolveMethod::ValueIteration ? value_iteration(dp, o.tol)
                                                 : policy_iteration(dp, o.tol);
}

Json transform_json(const DiscountedProblem& dp, double beta_min) {
  Json j;
  j["kind"] = to_string(dp.kind);
  j["beta"] = dp.beta;
  j["beta_min"] = beta_min;
  j["absorbing_state"] = dp.mdp.state_label(dp.absorbing_state);
  if (dp.marked_ell) j["ell"] = dp.mdp.state_label(*dp.marked_ell);
  j["max_row_defect"] = dp.max_row_defect;
  return j;
}

Json solution_json(const DiscountedProblem& dp, const SolveReport& s, const RunOptions& o) {
  Json j;
  j["method"] = o.method == SolveMethod::ValueIteration ? "value-iteration" : "policy-iteration";
  j["iterations"] = s.iterations;
  j["converged"] = s.converged;
  j["bellman_residual"] = s.residual_sup;
  j["discounted_value"] = table(dp.mdp, s.value);
  j["policy"] = policy_table(dp.mdp, restrict_policy(s.greedy_policy, dp.num_original_states()));
  return j;
}

std::size_t resolve_ell(const ModelDocument& doc, const RunOptions& o) {
  const auto label = o.ell ? o.ell : doc.ell;
  if (!label) throw Error(ErrorKind::InputError, "no marked state: pass --ell or set \"ell\"");
  const auto x = doc.mdp.find_state(*label);
  if (!x) throw Error(ErrorKind::InputError, "ell: unknown state '" + *label + "'");
  return *x;
}

const ModelDocument& need_model(const ModelDocument* doc) {
  if (!doc) throw Error(ErrorKind::InputError, "this command needs --model");
  return *doc;
}

struct Outcome {
  Json body = Json::object();
  Checks checks;
  int exit_code = kExitOk;
  std::string csv;
};

void run_validate(const ModelDocument& doc, Outcome& out) {
  const auto d = validate_model(doc.mdp);
  out.body["valid"] = d.valid();
  out.body["sup_row_mass"] = d.sup_row_mass;
  out.body["row_stochastic"] = doc.mdp.is_row_stochastic();
  out.body["states"] = doc.mdp.num_states();
  Json v = Json::array();
  for (const auto& e : d.violations) v.push_back(e.message);
  out.body["violations"] = std::move(v);
  if (!d.valid()) out.exit_code = kExitInput;
}

void run_certify_t(const ModelDocument& doc, const RunOptions& o, Outcome& out) {
  const auto v = doc.v.value_or(WeightFunction::ones(doc.mdp.num_states()));
  const auto r = compute_mu(doc.mdp, v, bound_options(o));
  out.body["certification"] = bound_json(doc.mdp, r, out.checks);
  out.checks.holds("assumption-T", r.certified);
  if (!r.certified) {
    out.body["error"] = r.message;
    out.exit_code = kExitCertification;
    return;
  }
  out.csv = value_csv(doc.mdp, r.weight.values);
}

void run_certify_ht(const ModelDocument& doc, const RunOptions& o, Outcome& out) {
  const std::size_t ell = resolve_ell(doc, o);
  const auto r = compute_mu_ell(doc.mdp, ell, bound_options(o));
  out.body["ell"] = doc.mdp.state_label(ell);
  out.body["certification"] = bound_json(doc.mdp, r, out.checks);
  out.checks.holds("assumption-HT", r.certified);
  if (!r.certified) {
    out.body["error"] = r.message;
    out.exit_code = kExitCertification;
    return;
  }
  out.csv = value_csv(doc.mdp, r.weight.values);
}

// Certify T, rewrite with HV, solve, lift, verify. Returns the lifted value.
std::optional<ValueVector> total_pipeline(const FiniteMdp& m, const WeightFunction& v,
                                          const RunOptions& o, bool with_oracle, Json& body,
                                          Checks& checks) {
  const auto bound = compute_mu(m, v, bound_options(o));
  body["certification"] = bound_json(m, bound, checks);
  checks.holds("assumption-T", bound.certified);
  if (!bound.certified) {
    body["error"] = bound.message;
    return std::nullopt;
  }
  const auto dp = hv_transform(m, bound, o.beta);
  body["transformation"] = transform_json(dp, min_admissible_beta(bound));
  checks.at_most("row-stochastic", dp.max_row_defect, kRowSumTol);

  const auto sol = solve_with(dp, o);
  body["solution"] = solution_json(dp, sol, o);
  const auto lifted = lift_total_value(dp, sol.value);
  body["solution"]["value"] = table(m, lifted);

  const auto [dmin, dphi] = dcoe_residual(dp, sol.value, sol.greedy_policy);
  const double tcoe = tcoe_residual(m, lifted);
  body["residuals"] = {{"dcoe_min_form", dmin}, {"dcoe_policy_form", dphi}, {"tcoe", tcoe}};
  checks.at_most("dcoe", std::max(dmin, dphi), std::max(o.tol, 1e-9));
  checks.at_most("tcoe", tcoe, kTcoeTol);

  if (with_oracle) {
    const auto orc = brute_force_optimum(m, TotalCriterion{}, o.oracle_cap);
    double diff = 0.0;
    for (std::size_t x = 0; x < lifted.size(); ++x) {
      diff = std::max(diff, std::abs(lifted[x] - orc.best_value[x]));
    }
    body["oracle"] = {{"policies_enumerated", orc.policies_enumerated},
                      {"single_policy_attains", orc.single_policy_attains},
                      {"value", table(m, orc.best_value)},
                      {"policy", policy_table(m, orc.best_policy)},
                      {"max_abs_difference", diff}};
    checks.at_most("oracle-total", diff, kOracleTotalTol);
  }
  return lifted;
}

struct AverageOutcome {
  LiftedAverageSolution lifted;
  StationaryPolicy policy;
};

std::optional<AverageOutcome> average_pipeline(const FiniteMdp& m, std::size_t ell,
                                               std::optional<double> k_ell, const RunOptions& o,
                                               bool with_oracle, Json& body, Checks& checks) {
  if (!m.is_row_stochastic(1e-12)) {
    throw Error(ErrorKind::InputError,
                "average-cost reduction requires a row-stochastic transition kernel");
  }
  const auto bound = compute_mu_ell(m, ell, bound_options(o));
  body["ell"] = m.state_label(ell);
  body["certification"] = bound_json(m, bound, checks);
  checks.holds("assumption-HT", bound.certified);
  if (!bound.certified) {
    body["error"] = bound.message;
    return std::nullopt;
  }
  if (k_ell) checks.at_most("assumption-HT-bound", sup_norm(bound.weight.values), *k_ell);

  const auto dp = hvag_transform(m, ell, bound, o.beta);
  body["transformation"] = transform_json(dp, min_admissible_beta(bound));
  checks.at_most("row-stochastic", dp.max_row_defect, kRowSumTol);

  const auto sol = solve_with(dp, o);
  body["solution"] = solution_json(dp, sol, o);
  AverageOutcome res{lift_average_solution(dp, sol.value),
                     restrict_policy(sol.greedy_policy, m.num_states())};
  body["solution"]["w"] = res.lifted.w;
  body["solution"]["h"] = table(m, res.lifted.h);

  const auto [dmin, dphi] = dcoe_residual(dp, sol.value, sol.greedy_policy);
  const double acoe = acoe_residual(m, res.lifted.w, res.lifted.h);
  body["residuals"] = {{"dcoe_min_form", dmin}, {"dcoe_policy_form", dphi}, {"acoe", acoe}};
  checks.at_most("dcoe", std::max(dmin, dphi), std::max(o.tol, 1e-9));
  checks.at_most("acoe", acoe, kAcoeTol);
  checks.at_most("h-ell-zero", std::abs(res.lifted.h[ell]), 0.0);

  if (with_oracle) {
    const auto orc = brute_force_optimum(m, AverageCriterion{ell}, o.oracle_cap);
    const double diff = std::abs(orc.best_value.front() - res.lifted.w);
    body["oracle"] = {{"policies_enumerated", orc.policies_enumerated},
                      {"w", orc.best_value.front()},
                      {"policy", policy_table(m, orc.best_policy)},
                      {"abs_difference", diff}};
    checks.at_most("oracle-average", diff, kOracleAverageTol);
  }
  return res;
}

void run_reduce_total(const ModelDocument& doc, const RunOptions& o, Outcome& out) {
  const auto v = doc.v.value_or(WeightFunction::ones(doc.mdp.num_states()));
  const auto lifted = total_pipeline(doc.mdp, v, o, o.compare_oracle, out.body, out.checks);
  if (!lifted) {
    out.exit_code = kExitCertification;
    return;
  }
  out.csv = value_csv(doc.mdp, *lifted);
}

void run_reduce_average(const ModelDocument& doc, const RunOptions& o, Outcome& out) {
  const std::size_t ell = resolve_ell(doc, o);
  const auto res = average_pipeline(doc.mdp, ell, std::nullopt, o, o.compare_oracle, out.body,
                                    out.checks);
  if (!res) {
    out.exit_code = kExitCertification;
    return;
  }
  out.csv = value_csv(doc.mdp, res->lifted.h);
}

void run_solve(const ModelDocument& doc, const RunOptions& o, Outcome& out) {
  if (!o.beta) throw Error(ErrorKind::InputError, "solve needs --beta");
  const auto dp = direct_discounted(doc.mdp, *o.beta);
  out.body["transformation"] = transform_json(dp, 0.0);
  const auto vi = value_iteration(dp, o.tol);
  const auto pi = policy_iteration(dp, o.tol);
  double diff = 0.0;
  for (std::size_t x = 0; x < vi.value.size(); ++x) {
    diff = std::max(diff, std::abs(vi.value[x] - pi.value[x]));
  }
  RunOptions as_vi = o;
  as_vi.method = SolveMethod::ValueIteration;
  RunOptions as_pi = o;
  as_pi.method = SolveMethod::PolicyIteration;
  out.body["value_iteration"] = solution_json(dp, vi, as_vi);
  out.body["policy_iteration"] = solution_json(dp, pi, as_pi);
  out.checks.holds("vi-converged", vi.converged);
  out.checks.at_most("method-agreement", diff, 2.0 * o.tol);
  const auto [dmin, dphi] = dcoe_residual(dp, pi.value, pi.greedy_policy);
  out.checks.at_most("dcoe", std::max(dmin, dphi), std::max(o.tol, 1e-9));
  out.csv = value_csv(doc.mdp, pi.value);
}

void run_oracle(const ModelDocument& doc, const RunOptions& o, Outcome& out) {
  const FiniteMdp& m = doc.mdp;
  if (o.criterion == "average") {
    const std::size_t ell = resolve_ell(doc, o);
    const auto r = brute_force_optimum(m, AverageCriterion{ell}, o.oracle_cap);
    out.body["criterion"] = "average";
    out.body["ell"] = m.state_label(ell);
    out.body["policies_enumerated"] = r.policies_enumerated;
    out.body["w"] = r.best_value.front();
    out.body["policy"] = policy_table(m, r.best_policy);
  } else if (o.criterion == "total") {
    const auto r = brute_force_optimum(m, TotalCriterion{}, o.oracle_cap);
    out.body["criterion"] = "total";
    out.body["policies_enumerated"] = r.policies_enumerated;
    out.body["single_policy_attains"] = r.single_policy_attains;
    out.body["value"] = table(m, r.best_value);
    out.body["policy"] = policy_table(m, r.best_policy);
    out.csv = value_csv(m, r.best_value);
  } else {
    throw Error(ErrorKind::InputError, "unknown criterion '" + o.criterion + "'");
  }
}

void run_inventory_demo(const ModelDocument* doc, const RunOptions& o, Outcome& out) {
  const InventorySpec spec = doc && doc->inventory ? *doc->inventory : fixture_inventory();
  const auto d = check_assumption_D(spec);
  out.body["assumption_D"] = {{"holds", d.holds}, {"gamma", d.gamma}};
  out.checks.holds("assumption-D", d.holds);
  if (!d.holds) {
    out.body["error"] = "Assumption D fails: demand never exceeds max_order";
    out.exit_code = kExitCertification;
    return;
  }
  const double bound = k_ell_bound(spec);
  out.body["k_ell_bound"] = bound;

  // Average cost with ell = 0_L.
  const FiniteMdp m = build_inventory_mdp(spec);
  const std::size_t ell = m.state_index(kLostSaleLabel);
  Json avg;
  Checks& checks = out.checks;
  const auto res = average_pipeline(m, ell, bound, o, true, avg, checks);
  if (res) {
    const auto sim = simulate_policy(m, res->policy, 0, o.horizon, o.replications, o.seed);
    const double dev = std::abs(sim.mean - res->lifted.w);
    avg["simulation"] = {{"start", m.state_label(0)}, {"horizon", o.horizon},
                         {"replications", o.replications}, {"seed", o.seed},
                         {"mean", sim.mean}, {"standard_error", sim.standard_error},
                         {"abs_deviation", dev}};
    checks.at_most("simulation", dev, 3.0 * sim.standard_error);
  }
  out.body["average_cost"] = std::move(avg);

  // Total cost before the first lost sale.
  const FiniteMdp lm = build_lost_sale_total_cost_mdp(spec);
  Json tot;
  const auto tcheck = check_assumption_T(lm, WeightFunction::ones(lm.num_states()), bound,
                                         bound_options(o));
  tot["assumption_T"] = {{"K", bound}, {"sup_mu", tcheck.bound_found}, {"holds", tcheck.holds}};
  checks.add("assumption-T-bound", tcheck.bound_found, bound, tcheck.holds);
  const auto lifted = total_pipeline(lm, WeightFunction::ones(lm.num_states()), o, true, tot, checks);
  out.body["lost_sale_total_cost"] = std::move(tot);

  if (!res || !lifted || !checks.all_pass) out.exit_code = kExitCertification;
  if (res) out.csv = value_csv(m, res->lifted.h);
}

void run_remark1_demo(const ModelDocument* doc, const RunOptions& o, Outcome& out) {
  const Remark1Spec spec = doc && doc->remark1 ? *doc->remark1 : fixture_remark1();
  const FiniteMdp m = build_remark1_mdp(spec);
  const std::size_t ell = m.num_states() - 1;
  BoundOptions b = bound_options(o);
  b.tol = std::min(o.tol, 1e-12);
  const auto r = compute_mu_ell(m, ell, b);
  out.body["tol_used"] = b.tol;
  out.body["certification"] = bound_json(m, r, out.checks);
  out.checks.holds("assumption-HT", r.certified);
  if (!r.certified) {
    out.body["error"] = r.message;
    out.exit_code = kExitCertification;
    return;
  }

  const double ell_star = remark1_ell();
  ValueVector expected(m.num_states());
  expected[0] = 1.0;
  for (std::size_t i = 0; i < spec.interior_grid.size(); ++i) {
    expected[i + 1] = 1.0 / (1.0 - spec.interior_grid[i]);
  }
  expected[ell] = (std::sqrt(5.0) + 1.0) / 2.0;
  double err = 0.0;
  for (std::size_t x = 0; x < m.num_states(); ++x) {
    err = std::max(err, std::abs(r.weight[x] - expected[x]));
  }
  out.body["golden"] = {{"expected", table(m, expected)}, {"computed", table(m, r.weight.values)},
                        {"max_abs_error", err}};
  out.checks.at_most("golden-mu-ell", err, kGoldenTol);

  const double bound = (std::sqrt(5.0) + 3.0) / 2.0;
  out.checks.at_most("assumption-HT-bound", sup_norm(r.weight.values), bound);

  if (!spec.interior_grid.empty()) {
    const double x_last = spec.interior_grid.back();
    const double gap = r.weight[ell - 1] - r.weight[ell];
    out.body["discontinuity"] = {{"nearest_point", x_last},
                                 {"distance_to_ell", ell_star - x_last},
                                 {"gap", gap},
                                 {"limit_gap", bound - expected[ell]}};
    if (ell_star - x_last <= 1e-3 + 1e-15) out.checks.at_least("discontinuity-gap", gap, kGapThreshold);
  }
  out.csv = value_csv(m, r.weight.values);
  if (!out.checks.all_pass) out.exit_code = kExitCertification;
}

Json inputs_json(const std::string& command, const ModelDocument* doc, const RunOptions& o) {
  Json j;
  j["command"] = command;
  j["tol"] = o.tol;
  if (o.beta) j["beta"] = *o.beta; else j["beta"] = "minimum-admissible";
  if (o.ell) j["ell"] = *o.ell;
  j["seed"] = o.seed;
  j["oracle_cap"] = o.oracle_cap;
  j["method"] = o.method == SolveMethod::ValueIteration ? "value-iteration" : "policy-iteration";
  if (doc) j["model"] = Json::parse(write_model(*doc));
  return j;
}

using Handler = std::function<void(const ModelDocument*, const RunOptions&, Outcome&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = {
      {"validate", [](auto* d, auto&, auto& out) { run_validate(need_model(d), out); }},
      {"certify-t", [](auto* d, auto& o, auto& out) { run_certify_t(need_model(d), o, out); }},
      {"certify-ht", [](auto* d, auto& o, auto& out) { run_certify_ht(need_model(d), o, out); }},
      {"reduce-total", [](auto* d, auto& o, auto& out) { run_reduce_total(need_model(d), o, out); }},
      {"reduce-average",
       [](auto* d, auto& o, auto& out) { run_reduce_average(need_model(d), o, out); }},
      {"solve", [](auto* d, auto& o, auto& out) { run_solve(need_model(d), o, out); }},
      {"oracle", [](auto* d, auto& o, auto& out) { run_oracle(need_model(d), o, out); }},
      {"inventory-demo", [](auto* d, auto& o, auto& out) { run_inventory_demo(d, o, out); }},
      {"remark1-demo", [](auto* d, auto& o, auto& out) { run_remark1_demo(d, o, out); }},
  };
  return h;
}

}  // namespace

bool is_known_command(const std::string& command) { return handlers().count(command) > 0; }

std::string value_csv(const FiniteMdp& m, std::span<const double> values) {
  std::string s = "state,value\n";
  char buf[64];
  for (std::size_t x = 0; x < values.size() && x < m.num_states(); ++x) {
    std::snprintf(buf, sizeof buf, "%.17g", values[x]);
    s += m.state_label(x);
    s += ',';
    s += buf;
    s += '\n';
  }
  return s;
}

RunResult run_command(const std::string& command, const ModelDocument* doc,
                      const RunOptions& opts) {
  Json report;
  report["tool"] = "mdpr";
  report["version"] = kVersion;
  report["inputs"] = inputs_json(command, doc, opts);

  Outcome out;
  RunResult result;
  try {
    const auto it = handlers().find(command);
    if (it == handlers().end()) throw Error(ErrorKind::InputError, "unknown command '" + command + "'");
    it->second(doc, opts, out);
    if (out.exit_code == kExitOk && !out.checks.all_pass) out.exit_code = kExitCertification;
  } catch (const Error& e) {
    out.body["error"] = e.what();
    out.exit_code = e.kind() == ErrorKind::InputError || e.kind() == ErrorKind::InvalidArgument
                        ? kExitInput
                        : kExitCertification;
  } catch (const std::exception& e) {
    out.body["error"] = e.what();
    out.exit_code = kExitInput;
  }
  for (auto& [k, v] : out.body.items()) report[k] = v;
  report["checks"] = out.checks.list;
  report["status"] = out.exit_code == kExitOk ? "ok"
                     : out.exit_code == kExitCertification ? "failed"
                                                           : "input-error";
  report["exit_code"] = out.exit_code;

  result.exit_code = out.exit_code;
  result.report = report.dump(2) + "\n";
  result.csv = std::move(out.csv);
  return result;
}

}  // namespace mdpr
