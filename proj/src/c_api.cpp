#include <covglasso/covglasso.h>

#include <covglasso/bench.hpp>
#include <covglasso/core.hpp>
#include <covglasso/errors.hpp>
#include <covglasso/matrix_io.hpp>
#include <covglasso/oracle.hpp>
#include <covglasso/solver_cd.hpp>
#include <covglasso/solver_ecm.hpp>
#include <covglasso/synthetic.hpp>

#include <cmath>
#include <new>
#include <string>

struct cgl_matrix
{
    covglasso::Matrix m;
};

struct cgl_result
{
    covglasso::SolverResult r;
};

namespace {

thread_local std::string last_error;
thread_local long last_column = -1;

cgl_status status_of(covglasso::ErrorKind kind)
{
    switch (kind) {
    case covglasso::ErrorKind::invalid_input: return CGL_INVALID_INPUT;
    case covglasso::ErrorKind::domain: return CGL_DOMAIN;
    case covglasso::ErrorKind::degenerate_subproblem: return CGL_DEGENERATE;
    case covglasso::ErrorKind::numerical: return CGL_NUMERICAL;
    case covglasso::ErrorKind::io: return CGL_IO;
    }
    return CGL_INTERNAL;
}

template <class F>
cgl_status guarded(F&& f)
{
    last_error.clear();
    last_column = -1;
    try {
        f();
        return CGL_OK;
    } catch (const covglasso::Error& e) {
        last_error = e.what();
        if (e.column()) last_column = static_cast<long>(*e.column());
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
    } catch (const std::exception& e) {
        last_error = e.what();
    } catch (...) {
        last_error = "unknown error";
    }
    return CGL_INTERNAL;
}

void require(const void* ptr, const char* name)
{
    if (!ptr) covglasso::throw_invalid(std::string(name) + " must not be NULL");
}

covglasso::CovarianceMatrix as_covariance(const cgl_matrix* m, const char* name)
{
    require(m, name);
    if (m->m.rows() != m->m.cols()) covglasso::throw_invalid(std::string(name) + " must be square");
    return covglasso::CovarianceMatrix(m->m, 1e-8);
}

covglasso::PenaltySpec as_penalty(double rho, const cgl_matrix* penalty)
{
    if (penalty) return covglasso::PenaltySpec(penalty->m);
    return covglasso::PenaltySpec(rho);
}

covglasso::ModelKind as_model(cgl_model model)
{
    switch (model) {
    case CGL_MODEL_SPARSE: return covglasso::ModelKind::sparse_tridiagonal;
    case CGL_MODEL_DENSE: return covglasso::ModelKind::dense_compound;
    }
    covglasso::throw_invalid("unknown model kind");
}

covglasso::SolverConfig as_config(const cgl_options* opts)
{
    covglasso::SolverConfig cfg;
    if (!opts) return cfg;
    cfg.outer_tol = opts->outer_tol;
    cfg.inner_tol = opts->inner_tol;
    cfg.max_outer_iters = opts->max_outer_iters;
    cfg.max_inner_iters = opts->max_inner_iters;
    cfg.ecm_scale_floor = opts->ecm_scale_floor;
    cfg.zero_report_threshold = opts->zero_report_threshold;
    cfg.ecm_promote_diagonal_init = opts->ecm_promote_diagonal_init != 0;
    switch (opts->init) {
    case CGL_INIT_FULL: cfg.init = covglasso::InitStrategy::full(); break;
    case CGL_INIT_DIAG: cfg.init = covglasso::InitStrategy::diagonal(); break;
    case CGL_INIT_DIAG_EPS: cfg.init = covglasso::InitStrategy::diagonal_plus(opts->init_eps); break;
    case CGL_INIT_CUSTOM:
        require(opts->custom_init, "custom_init");
        cfg.init = covglasso::InitStrategy::from(opts->custom_init->m);
        break;
    default: covglasso::throw_invalid("unknown init kind");
    }
    return cfg;
}

} // namespace

extern "C" {

const char* cgl_last_error(void) { return last_error.c_str(); }

long cgl_last_error_column(void) { return last_column; }

const char* cgl_status_string(cgl_status status)
{
    switch (status) {
    case CGL_OK: return "ok";
    case CGL_INVALID_INPUT: return "invalid input";
    case CGL_DOMAIN: return "domain error";
    case CGL_DEGENERATE: return "degenerate subproblem";
    case CGL_NUMERICAL: return "numerical failure";
    case CGL_IO: return "i/o error";
    case CGL_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* cgl_version(void) { return "0.1.0"; }

cgl_status cgl_matrix_create(size_t rows, size_t cols, const double* data, cgl_matrix** out)
{
    return guarded([&] {
        require(out, "out");
        if (rows == 0 || cols == 0) covglasso::throw_invalid("matrix dimensions must be positive");
        auto h = new cgl_matrix{covglasso::Matrix::Zero(static_cast<covglasso::Index>(rows),
                                                        static_cast<covglasso::Index>(cols))};
        if (data) {
            for (size_t i = 0; i < rows; ++i) {
                for (size_t j = 0; j < cols; ++j) h->m(i, j) = data[i * cols + j];
            }
        }
        *out = h;
    });
}

cgl_status cgl_matrix_read_csv(const char* path, cgl_matrix** out)
{
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new cgl_matrix{covglasso::io::read_matrix_csv(std::string(path))};
    });
}

cgl_status cgl_matrix_write_csv(const cgl_matrix* m, const char* path)
{
    return guarded([&] {
        require(m, "matrix");
        require(path, "path");
        covglasso::io::write_matrix_csv(std::string(path), m->m);
    });
}

size_t cgl_matrix_rows(const cgl_matrix* m) { return m ? static_cast<size_t>(m->m.rows()) : 0; }

size_t cgl_matrix_cols(const cgl_matrix* m) { return m ? static_cast<size_t>(m->m.cols()) : 0; }

double cgl_matrix_get(const cgl_matrix* m, size_t i, size_t j)
{
    if (!m || i >= static_cast<size_t>(m->m.rows()) || j >= static_cast<size_t>(m->m.cols())) return std::nan("");
    return m->m(static_cast<covglasso::Index>(i), static_cast<covglasso::Index>(j));
}

cgl_status cgl_matrix_copy(const cgl_matrix* m, double* out, size_t capacity)
{
    return guarded([&] {
        require(m, "matrix");
        require(out, "out");
        const size_t rows = m->m.rows(), cols = m->m.cols();
        if (capacity < rows * cols) covglasso::throw_invalid("output buffer too small");
        for (size_t i = 0; i < rows; ++i) {
            for (size_t j = 0; j < cols; ++j) out[i * cols + j] = m->m(i, j);
        }
    });
}

void cgl_matrix_free(cgl_matrix* m) { delete m; }

cgl_status cgl_sample_covariance(const cgl_matrix* y, int center, cgl_matrix** out)
{
    return guarded([&] {
        require(y, "y");
        require(out, "out");
        *out = new cgl_matrix{covglasso::sample_covariance(y->m, center != 0).matrix()};
    });
}

cgl_status cgl_objective(const cgl_matrix* sigma, const cgl_matrix* s, double rho, const cgl_matrix* penalty,
                         double* out)
{
    return guarded([&] {
        require(out, "out");
        *out = covglasso::objective(as_covariance(sigma, "sigma"), as_covariance(s, "s"), as_penalty(rho, penalty));
    });
}

void cgl_options_default(cgl_options* opts)
{
    if (!opts) return;
    const covglasso::SolverConfig cfg;
    opts->outer_tol = cfg.outer_tol;
    opts->inner_tol = cfg.inner_tol;
    opts->max_outer_iters = cfg.max_outer_iters;
    opts->max_inner_iters = cfg.max_inner_iters;
    opts->init = CGL_INIT_FULL;
    opts->init_eps = cfg.init.eps;
    opts->custom_init = nullptr;
    opts->ecm_scale_floor = cfg.ecm_scale_floor;
    opts->zero_report_threshold = cfg.zero_report_threshold;
    opts->ecm_promote_diagonal_init = cfg.ecm_promote_diagonal_init ? 1 : 0;
}

cgl_status cgl_solve(const cgl_matrix* s, cgl_solver solver, double rho, const cgl_matrix* penalty,
                     const cgl_options* opts, cgl_result** out)
{
    return guarded([&] {
        require(out, "out");
        const auto cov = as_covariance(s, "s");
        const auto pen = as_penalty(rho, penalty);
        const auto cfg = as_config(opts);
        covglasso::SolverResult r;
        switch (solver) {
        case CGL_SOLVER_CD: r = covglasso::solve_cd(cov, pen, cfg); break;
        case CGL_SOLVER_ECM: r = covglasso::solve_ecm(cov, pen, cfg); break;
        default: covglasso::throw_invalid("unknown solver");
        }
        *out = new cgl_result{std::move(r)};
    });
}

cgl_status cgl_result_sigma(const cgl_result* r, cgl_matrix** out)
{
    return guarded([&] {
        require(r, "result");
        require(out, "out");
        *out = new cgl_matrix{r->r.sigma_hat.matrix()};
    });
}

size_t cgl_result_trace_length(const cgl_result* r) { return r ? r->r.objective_trace.size() : 0; }

const double* cgl_result_trace(const cgl_result* r) { return r ? r->r.objective_trace.data() : nullptr; }

int cgl_result_converged(const cgl_result* r) { return r && r->r.converged ? 1 : 0; }

int cgl_result_iterations(const cgl_result* r) { return r ? r->r.outer_iters : 0; }

double cgl_result_wall_time(const cgl_result* r) { return r ? r->r.wall_time : 0.0; }

double cgl_result_nonzero_fraction(const cgl_result* r) { return r ? r->r.nonzero_fraction : 0.0; }

void cgl_result_free(cgl_result* r) { delete r; }

cgl_status cgl_make_sigma(cgl_model model, int p, cgl_matrix** out)
{
    return guarded([&] {
        require(out, "out");
        *out = new cgl_matrix{covglasso::make_sigma(as_model(model), p).matrix()};
    });
}

cgl_status cgl_generate_dataset(cgl_model model, int p, int n, uint64_t seed, const char* dir, const char* stem)
{
    return guarded([&] {
        require(dir, "dir");
        require(stem, "stem");
        const auto data = covglasso::generate_dataset({as_model(model), p, n, seed});
        covglasso::io::write_dataset(data, dir, stem);
    });
}

cgl_status cgl_run_sweep(const char* plan_path, const char* out_dir, int threads)
{
    return guarded([&] {
        require(plan_path, "plan_path");
        require(out_dir, "out_dir");
        auto plan = covglasso::bench::read_plan(plan_path);
        if (threads > 0) plan.threads = threads;
        const auto records = covglasso::bench::run_experiment(plan);
        covglasso::bench::emit_report(records, out_dir, plan.config.zero_report_threshold);
    });
}

cgl_status cgl_verify(cgl_check_callback cb, void* user, int* failures)
{
    return guarded([&] {
        const int n = covglasso::oracle::run_verification_suite(
            [&](const std::string& name, bool passed, const std::string& detail) {
                if (cb) cb(name.c_str(), passed ? 1 : 0, detail.c_str(), user);
            });
        if (failures) *failures = n;
    });
}

} // extern "C"
