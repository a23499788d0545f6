#ifndef COVGLASSO_H
#define COVGLASSO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(COVGLASSO_BUILDING_LIBRARY)
#    define COVGLASSO_API __declspec(dllexport)
#  else
#    define COVGLASSO_API __declspec(dllimport)
#  endif
#else
#  define COVGLASSO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cgl_status {
    CGL_OK = 0,
    CGL_INVALID_INPUT = 1,
    CGL_DOMAIN = 2,
    CGL_DEGENERATE = 3,
    CGL_NUMERICAL = 4,
    CGL_IO = 5,
    CGL_INTERNAL = 6
} cgl_status;

typedef enum cgl_solver {
    CGL_SOLVER_CD = 0,
    CGL_SOLVER_ECM = 1
} cgl_solver;

typedef enum cgl_init {
    CGL_INIT_FULL = 0,       /* start at S */
    CGL_INIT_DIAG = 1,       /* diag(S); ECM promotes it to diag(S) + 1e-3 unless disabled */
    CGL_INIT_DIAG_EPS = 2,   /* diag(S) + init_eps on every entry */
    CGL_INIT_CUSTOM = 3      /* cgl_options.custom_init */
} cgl_init;

typedef enum cgl_model {
    CGL_MODEL_SPARSE = 0,
    CGL_MODEL_DENSE = 1
} cgl_model;

/* Dense row-major matrix. */
typedef struct cgl_matrix cgl_matrix;
typedef struct cgl_result cgl_result;

typedef struct cgl_options {
    double outer_tol;
    double inner_tol;
    int max_outer_iters;
    int max_inner_iters;
    cgl_init init;
    double init_eps;
    const cgl_matrix* custom_init; /* borrowed; used with CGL_INIT_CUSTOM */
    double ecm_scale_floor;
    double zero_report_threshold;
    int ecm_promote_diagonal_init;
} cgl_options;

/* Message of the last failing call on this thread; empty after a success. */
COVGLASSO_API const char* cgl_last_error(void);
/* Column at which the last failure happened, or -1. */
COVGLASSO_API long cgl_last_error_column(void);
COVGLASSO_API const char* cgl_status_string(cgl_status status);
COVGLASSO_API const char* cgl_version(void);

COVGLASSO_API cgl_status cgl_matrix_create(size_t rows, size_t cols, const double* data, cgl_matrix** out);
COVGLASSO_API cgl_status cgl_matrix_read_csv(const char* path, cgl_matrix** out);
COVGLASSO_API cgl_status cgl_matrix_write_csv(const cgl_matrix* m, const char* path);
COVGLASSO_API size_t cgl_matrix_rows(const cgl_matrix* m);
COVGLASSO_API size_t cgl_matrix_cols(const cgl_matrix* m);
COVGLASSO_API double cgl_matrix_get(const cgl_matrix* m, size_t i, size_t j);
/* Copies rows*cols values, row-major. */
COVGLASSO_API cgl_status cgl_matrix_copy(const cgl_matrix* m, double* out, size_t capacity);
COVGLASSO_API void cgl_matrix_free(cgl_matrix* m);

/* Divides by n; centers the columns first when center is nonzero. */
COVGLASSO_API cgl_status cgl_sample_covariance(const cgl_matrix* y, int center, cgl_matrix** out);
/* penalty may be NULL, in which case rho is used for every entry. */
COVGLASSO_API cgl_status cgl_objective(const cgl_matrix* sigma, const cgl_matrix* s, double rho,
                                       const cgl_matrix* penalty, double* out);

COVGLASSO_API void cgl_options_default(cgl_options* opts);

/* opts may be NULL for defaults; penalty may be NULL to use rho. */
COVGLASSO_API cgl_status cgl_solve(const cgl_matrix* s, cgl_solver solver, double rho, const cgl_matrix* penalty,
                                   const cgl_options* opts, cgl_result** out);
COVGLASSO_API cgl_status cgl_result_sigma(const cgl_result* r, cgl_matrix** out);
COVGLASSO_API size_t cgl_result_trace_length(const cgl_result* r);
COVGLASSO_API const double* cgl_result_trace(const cgl_result* r);
COVGLASSO_API int cgl_result_converged(const cgl_result* r);
COVGLASSO_API int cgl_result_iterations(const cgl_result* r);
COVGLASSO_API double cgl_result_wall_time(const cgl_result* r);
COVGLASSO_API double cgl_result_nonzero_fraction(const cgl_result* r);
COVGLASSO_API void cgl_result_free(cgl_result* r);

COVGLASSO_API cgl_status cgl_make_sigma(cgl_model model, int p, cgl_matrix** out);
/* Writes <dir>/<stem>_Y.csv, <stem>_sigma.csv, <stem>_S.csv and <stem>.meta. */
COVGLASSO_API cgl_status cgl_generate_dataset(cgl_model model, int p, int n, uint64_t seed, const char* dir,
                                              const char* stem);

/* Runs the plan file and writes the report CSVs into out_dir. threads > 0 overrides the plan. */
COVGLASSO_API cgl_status cgl_run_sweep(const char* plan_path, const char* out_dir, int threads);

typedef void (*cgl_check_callback)(const char* name, int passed, const char* detail, void* user);
/* Runs the built-in oracle checks; *failures receives the number of failed checks. */
COVGLASSO_API cgl_status cgl_verify(cgl_check_callback cb, void* user, int* failures);

#ifdef __cplusplus
}
#endif

#endif
