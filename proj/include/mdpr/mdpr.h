#ifndef MDPR_H
#define MDPR_H

/* C interface to the mdpr library. All handles are opaque; every function
 * that can fail returns an mdpr_status and records a message retrievable
 * with mdpr_last_error() on the calling thread. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MDPR_BUILDING)
#    define MDPR_API __declspec(dllexport)
#  else
#    define MDPR_API __declspec(dllimport)
#  endif
#else
#  define MDPR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mdpr_status {
  MDPR_OK = 0,
  MDPR_ERR_INVALID_ARGUMENT = 1,
  MDPR_ERR_INPUT = 2,
  MDPR_ERR_NOT_TRANSIENT = 3,
  MDPR_ERR_CERTIFICATION = 4,
  MDPR_ERR_NUMERIC = 5,
  MDPR_ERR_INTERNAL = 6
} mdpr_status;

typedef struct mdpr_model mdpr_model;
typedef struct mdpr_report mdpr_report;

typedef enum mdpr_method {
  MDPR_METHOD_POLICY_ITERATION = 0,
  MDPR_METHOD_VALUE_ITERATION = 1
} mdpr_method;

typedef struct mdpr_options {
  int has_beta;
  double beta;
  double tol;
  const char* ell; /* NULL: use the model's "ell" */
  uint64_t seed;
  size_t oracle_cap;
  int compare_oracle;
  mdpr_method method;
  const char* criterion; /* "total" or "average"; NULL means "total" */
  size_t horizon;
  size_t replications;
} mdpr_options;

MDPR_API const char* mdpr_version(void);
MDPR_API const char* mdpr_last_error(void);

MDPR_API void mdpr_options_init(mdpr_options* opts);

MDPR_API mdpr_status mdpr_model_load(const char* path, mdpr_model** out);
MDPR_API mdpr_status mdpr_model_parse(const char* json_text, mdpr_model** out);
MDPR_API void mdpr_model_free(mdpr_model* model);
MDPR_API size_t mdpr_model_num_states(const mdpr_model* model);
/* Borrowed pointer, valid while the model lives. NULL when out of range. */
MDPR_API const char* mdpr_model_state_label(const mdpr_model* model, size_t state);
/* Caller releases *out with mdpr_string_free. */
MDPR_API mdpr_status mdpr_model_serialize(const mdpr_model* model, char** out);
MDPR_API void mdpr_string_free(char* s);

/* Runs a CLI command. model may be NULL for the demo commands. A report is
 * produced for every recognised command, including failed ones; its exit
 * code is 0, 1 (certification failure) or 2 (input error). */
MDPR_API mdpr_status mdpr_run(const char* command, const mdpr_model* model,
                              const mdpr_options* opts, mdpr_report** out);
MDPR_API int mdpr_report_exit_code(const mdpr_report* report);
MDPR_API const char* mdpr_report_json(const mdpr_report* report);
/* Empty string when the command produces no value table. */
MDPR_API const char* mdpr_report_csv(const mdpr_report* report);
MDPR_API void mdpr_report_free(mdpr_report* report);

/* Numeric entry points. Output arrays hold mdpr_model_num_states() values;
 * k_hat may be NULL. */
MDPR_API mdpr_status mdpr_compute_mu(const mdpr_model* model, const double* v, double tol,
                                     double* mu_out, double* k_hat);
MDPR_API mdpr_status mdpr_compute_mu_ell(const mdpr_model* model, size_t ell, double tol,
                                         double* mu_out, double* k_hat);
/* beta < 0 selects the minimum admissible discount. */
MDPR_API mdpr_status mdpr_reduce_total(const mdpr_model* model, double beta, double tol,
                                       double* value_out);
MDPR_API mdpr_status mdpr_reduce_average(const mdpr_model* model, size_t ell, double beta,
                                         double tol, double* w_out, double* h_out);

#ifdef __cplusplus
}
#endif

#endif
