/* C interface to the espdesign library: experiment selection under
 * elementary-symmetric-polynomial objectives.
 *
 * Conventions:
 *   - Every function returns an espd_status; on failure a message is
 *     available from espd_last_error() on the same thread.
 *   - Matrices are passed row-major, rows = experiments.
 *   - Row indices are 0-based.
 *   - Handles are opaque and owned by the caller; free them with the
 *     matching *_free function. Passing NULL to a free function is a no-op.
 */
#ifndef ESPDESIGN_ESPDESIGN_H
#define ESPDESIGN_ESPDESIGN_H

#include <stddef.h>
#include <stdint.h>

#if defined(ESPD_BUILDING_LIBRARY)
#define ESPD_API __attribute__((visibility("default")))
#else
#define ESPD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum espd_status {
  ESPD_OK = 0,
  ESPD_ERR_INPUT = 1,
  ESPD_ERR_DOMAIN = 2,
  ESPD_ERR_INFEASIBLE_DESIGN = 3,
  ESPD_ERR_INFEASIBLE_PROBLEM = 4,
  ESPD_ERR_STUCK_INFEASIBLE = 5,
  ESPD_ERR_CANNOT_ROUND = 6,
  ESPD_ERR_NUMERIC = 7,
  ESPD_ERR_BUDGET = 8,
  ESPD_ERR_PARSE = 9,
  ESPD_ERR_IO = 10,
  ESPD_ERR_INTERNAL = 11
} espd_status;

typedef enum espd_method {
  ESPD_METHOD_UNIF = 0,
  ESPD_METHOD_UNIF_FDV = 1,
  ESPD_METHOD_GREEDY = 2,
  ESPD_METHOD_GREEDY_FDV = 3,
  ESPD_METHOD_SAMPLE = 4,
  ESPD_METHOD_RELAX = 5
} espd_method;

typedef enum espd_synthetic_kind {
  ESPD_SYNTHETIC_SPARSE_PRECISION = 0,
  ESPD_SYNTHETIC_SKEWED_COVARIANCE = 1
} espd_synthetic_kind;

typedef struct espd_dataset espd_dataset;
typedef struct espd_result espd_result;

typedef struct espd_synthetic_spec {
  espd_synthetic_kind kind;
  size_t n;
  size_t m;
  double density; /* sparse precision, in (0, 1] */
  double alpha;   /* skewed covariance, >= 0 */
  uint64_t seed;
} espd_synthetic_spec;

typedef struct espd_solver_config {
  int max_iters;
  double step_init;
  double tol_obj;
  double tol_grad;
  int max_sweeps; /* Fedorov exchange cap */
} espd_solver_config;

typedef struct espd_property_report {
  const char* group;
  const char* name;
  int passed;
  double residual;
  double tolerance;
  int samples;
} espd_property_report;

#define ESPD_VERIFY_DEFAULT_SEED 20240601u

typedef void (*espd_property_callback)(const espd_property_report* report, void* user);

/* Thread-local message for the last failing call; never NULL. */
ESPD_API const char* espd_last_error(void);
ESPD_API const char* espd_status_name(espd_status status);

/* Data */
ESPD_API espd_status espd_dataset_generate(const espd_synthetic_spec* spec, espd_dataset** out);
/* response may be NULL (no response column): a header name, or a 0-based
 * index when no header matches. */
ESPD_API espd_status espd_dataset_load_csv(const char* path, const char* response, int normalize,
                                           espd_dataset** out);
/* y may be NULL. */
ESPD_API espd_status espd_dataset_from_rows(const double* rows, size_t n, size_t m, const double* y,
                                            espd_dataset** out);
ESPD_API espd_status espd_dataset_write_csv(const espd_dataset* data, const char* path);
ESPD_API espd_status espd_dataset_shape(const espd_dataset* data, size_t* n, size_t* m, int* has_response);
/* Copies n*m row-major values into out. */
ESPD_API espd_status espd_dataset_rows(const espd_dataset* data, double* out, size_t capacity);
ESPD_API void espd_dataset_free(espd_dataset* data);

/* Solving */
ESPD_API void espd_solver_config_default(espd_solver_config* cfg);
/* "UNIF" ... "RELAX"; NULL for an unknown value. */
ESPD_API const char* espd_method_name(espd_method method);
/* Accepts unif, unif-fdv, greedy, greedy-fdv, sample, relax or the tags,
 * case-insensitive. */
ESPD_API espd_status espd_method_parse(const char* text, espd_method* out);
/* cfg may be NULL for defaults. */
ESPD_API espd_status espd_solve(const espd_dataset* data, espd_method method, int k, int order, uint64_t seed,
                                const espd_solver_config* cfg, espd_result** out);
ESPD_API espd_status espd_result_objective(const espd_result* result, double* out);
/* With out == NULL, only *count is written. */
ESPD_API espd_status espd_result_subset(const espd_result* result, size_t* out, size_t capacity, size_t* count);
/* Relaxed weights (n entries) for methods that solve the relaxation;
 * ESPD_ERR_INPUT otherwise. */
ESPD_API espd_status espd_result_weights(const espd_result* result, double* out, size_t capacity, size_t* count);
ESPD_API espd_status espd_result_relaxation(const espd_result* result, size_t* support, double* weight_sum,
                                            int* iterations, int* converged);
ESPD_API espd_status espd_result_draws(const espd_result* result, uint64_t* out);
ESPD_API void espd_result_free(espd_result* result);

/* Metrics */
ESPD_API espd_status espd_objective(const espd_dataset* data, const size_t* subset, size_t count, int order,
                                    double* out);
ESPD_API espd_status espd_predictive_error(const espd_dataset* data, const size_t* subset, size_t count,
                                           double* out);
/* Uses the raw (denormalized) feature values. */
ESPD_API espd_status espd_sparsity_fraction(const espd_dataset* data, const size_t* subset, size_t count,
                                            double* out);
/* e_order(values); order 0 yields 0. Writes log|e|, and sign in {-1, 0, 1}. */
ESPD_API espd_status espd_esp_vector(const double* values, size_t count, int order, double* log_value, int* sign);

/* Verification suite. only and inject_fault may be NULL. *all_passed is set
 * to 1 iff every selected property passed. */
ESPD_API espd_status espd_verify_run(const char* only, const char* inject_fault, uint64_t seed,
                                     espd_property_callback callback, void* user, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif
