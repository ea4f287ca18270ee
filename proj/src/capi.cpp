#include "mdpr/mdpr.h"

#include <cstring>
#include <new>
#include <string>

#include "mdpr/bounding.hpp"
#include "mdpr/pipeline.hpp"
#include "mdpr/solve.hpp"
#include "mdpr/transform.hpp"
#include "mdpr/version.hpp"

struct mdpr_model {
  mdpr::ModelDocument doc;
};

struct mdpr_report {
  mdpr::RunResult result;
};

namespace {

thread_local std::string g_last_error;

mdpr_status fail(mdpr_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

mdpr_status to_status(mdpr::ErrorKind k) {
  switch (k) {
    case mdpr::ErrorKind::InvalidArgument: return MDPR_ERR_INVALID_ARGUMENT;
    case mdpr::ErrorKind::InputError: return MDPR_ERR_INPUT;
    case mdpr::ErrorKind::NotTransient: return MDPR_ERR_NOT_TRANSIENT;
    case mdpr::ErrorKind::Certification: return MDPR_ERR_CERTIFICATION;
    case mdpr::ErrorKind::Numeric: return MDPR_ERR_NUMERIC;
  }
  return MDPR_ERR_INTERNAL;
}

template <class F>
mdpr_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const mdpr::Error& e) {
    return fail(to_status(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MDPR_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MDPR_ERR_INTERNAL, e.what());
  }
}

mdpr::BoundOptions bound_options(double tol) {
  mdpr::BoundOptions b;
  if (tol > 0.0) b.tol = tol;
  return b;
}

void copy_out(const std::vector<double>& src, std::size_t n, double* dst) {
  std::memcpy(dst, src.data(), n * sizeof(double));
}

}  // namespace

extern "C" {

const char* mdpr_version(void) { return mdpr::kVersion; }

const char* mdpr_last_error(void) { return g_last_error.c_str(); }

void mdpr_options_init(mdpr_options* opts) {
  if (!opts) return;
  const mdpr::RunOptions d;
  opts->has_beta = 0;
  opts->beta = 0.0;
  opts->tol = d.tol;
  opts->ell = nullptr;
  opts->seed = d.seed;
  opts->oracle_cap = d.oracle_cap;
  opts->compare_oracle = 0;
  opts->method = MDPR_METHOD_POLICY_ITERATION;
  opts->criterion = nullptr;
  opts->horizon = d.horizon;
  opts->replications = d.replications;
}

mdpr_status mdpr_model_load(const char* path, mdpr_model** out) {
  if (!path || !out) return fail(MDPR_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new mdpr_model{mdpr::load_model(path)};
    return MDPR_OK;
  });
}

mdpr_status mdpr_model_parse(const char* json_text, mdpr_model** out) {
  if (!json_text || !out) return fail(MDPR_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new mdpr_model{mdpr::parse_model(json_text)};
    return MDPR_OK;
  });
}

void mdpr_model_free(mdpr_model* model) { delete model; }

size_t mdpr_model_num_states(const mdpr_model* model) {
  return model ? model->doc.mdp.num_states() : 0;
}

const char* mdpr_model_state_label(const mdpr_model* model, size_t state) {
  if (!model || state >= model->doc.mdp.num_states()) return nullptr;
  return model->doc.mdp.state_label(state).c_str();
}

mdpr_status mdpr_model_serialize(const mdpr_model* model, char** out) {
  if (!model || !out) return fail(MDPR_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const std::string s = mdpr::write_model(model->doc);
    char* buf = new char[s.size() + 1];
    std::memcpy(buf, s.c_str(), s.size() + 1);
    *out = buf;
    return MDPR_OK;
  });
}

void mdpr_string_free(char* s) { delete[] s; }

mdpr_status mdpr_run(const char* command, const mdpr_model* model, const mdpr_options* opts,
                     mdpr_report** out) {
  if (!command || !out) return fail(MDPR_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    mdpr::RunOptions o;
    if (opts) {
      if (opts->has_beta) o.beta = opts->beta;
      o.tol = opts->tol;
      if (opts->ell) o.ell = std::string(opts->ell);
      o.seed = opts->seed;
      o.oracle_cap = opts->oracle_cap;
      o.compare_oracle = opts->compare_oracle != 0;
      o.method = opts->method == MDPR_METHOD_VALUE_ITERATION ? mdpr::SolveMethod::ValueIteration
                                                            : mdpr::SolveMethod::PolicyIteration;
      if (opts->criterion) o.criterion = opts->criterion;
      o.horizon = opts->horizon;
      o.replications = opts->replications;
    }
    *out = new mdpr_report{mdpr::run_command(command, model ? &model->doc : nullptr, o)};
    if ((*out)->result.exit_code != mdpr::kExitOk) {
      g_last_error = "command finished with exit code " + std::to_string((*out)->result.exit_code);
    }
    return MDPR_OK;
  });
}

int mdpr_report_exit_code(const mdpr_report* report) {
  return report ? report->result.exit_code : mdpr::kExitInput;
}

const char* mdpr_report_json(const mdpr_report* report) {
  return report ? report->result.report.c_str() : "";
}

const char* mdpr_report_csv(const mdpr_report* report) {
  return report ? report->result.csv.c_str() : "";
}

void mdpr_report_free(mdpr_report* report) { delete report; }

mdpr_status mdpr_compute_mu(const mdpr_model* model, const double* v, double tol, double* mu_out,
                            double* k_hat) {
  if (!model || !mu_out) return fail(MDPR_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto& m = model->doc.mdp;
    const std::size_t n = m.num_states();
    auto w = mdpr::WeightFunction::ones(n);
    if (v) w.values.assign(v, v + n);
    const auto r = mdpr::compute_mu(m, w, bound_options(tol));
    if (!r.certified) return fail(MDPR_ERR_CERTIFICATION, r.message);
    copy_out(r.weight.values, n, mu_out);
    if (k_hat) *k_hat = r.k_hat;
    return MDPR_OK;
  });
}

mdpr_status mdpr_compute_mu_ell(const mdpr_model* model, size_t ell, double tol, double* mu_out,
                                double* k_hat) {
  if (!model || !mu_out) return fail(MDPR_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto& m = model->doc.mdp;
    const auto r = mdpr::compute_mu_ell(m, ell, bound_options(tol));
    if (!r.certified) return fail(MDPR_ERR_CERTIFICATION, r.message);
    copy_out(r.weight.values, m.num_states(), mu_out);
    if (k_hat) *k_hat = r.k_hat;
    return MDPR_OK;
  });
}

mdpr_status mdpr_reduce_total(const mdpr_model* model, double beta, double tol,
                              double* value_out) {
  if (!model || !value_out) return fail(MDPR_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto& m = model->doc.mdp;
    const auto v = model->doc.v.value_or(mdpr::WeightFunction::ones(m.num_states()));
    const auto r = mdpr::compute_mu(m, v, bound_options(tol));
    if (!r.certified) return fail(MDPR_ERR_CERTIFICATION, r.message);
    const auto dp =
        mdpr::hv_transform(m, r, beta < 0.0 ? std::nullopt : std::optional<double>(beta));
    const auto sol = mdpr::policy_iteration(dp, tol > 0.0 ? tol : 1e-10);
    copy_out(mdpr::lift_total_value(dp, sol.value), m.num_states(), value_out);
    return MDPR_OK;
  });
}

mdpr_status mdpr_reduce_average(const mdpr_model* model, size_t ell, double beta, double tol,
                                double* w_out, double* h_out) {
  if (!model || !w_out || !h_out) return fail(MDPR_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto& m = model->doc.mdp;
    const auto r = mdpr::compute_mu_ell(m, ell, bound_options(tol));
    if (!r.certified) return fail(MDPR_ERR_CERTIFICATION, r.message);
    const auto dp =
        mdpr::hvag_transform(m, ell, r, beta < 0.0 ? std::nullopt : std::optional<double>(beta));
    const auto sol = mdpr::policy_iteration(dp, tol > 0.0 ? tol : 1e-10);
    const auto lifted = mdpr::lift_average_solution(dp, sol.value);
    *w_out = lifted.w;
    copy_out(lifted.h, m.num_states(), h_out);
    return MDPR_OK;
  });
}

}  // extern "C"
