#include <covglasso/covglasso.h>

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <string>

namespace {

enum Exit { exit_ok = 0, exit_usage = 1, exit_numerical = 2 };

int fail(cgl_status st)
{
    std::fprintf(stderr, "error: %s: %s\n", cgl_status_string(st), cgl_last_error());
    if (cgl_last_error_column() >= 0) std::fprintf(stderr, "  at column %ld\n", cgl_last_error_column());
    switch (st) {
    case CGL_INVALID_INPUT:
    case CGL_IO: return exit_usage;
    default: return exit_numerical;
    }
}

struct MatrixDeleter
{
    void operator()(cgl_matrix* m) const { cgl_matrix_free(m); }
};
struct ResultDeleter
{
    void operator()(cgl_result* r) const { cgl_result_free(r); }
};
using MatrixPtr = std::unique_ptr<cgl_matrix, MatrixDeleter>;
using ResultPtr = std::unique_ptr<cgl_result, ResultDeleter>;

cgl_model model_of(const std::string& name) { return name == "dense" ? CGL_MODEL_DENSE : CGL_MODEL_SPARSE; }

struct GenerateArgs
{
    std::string model = "sparse";
    int p = 50;
    int n = 100;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::string stem;
};

int run_generate(const GenerateArgs& a)
{
    const std::string stem = a.stem.empty() ? a.model + "_p" + std::to_string(a.p) + "_n" + std::to_string(a.n)
                                                  + "_s" + std::to_string(a.seed)
                                            : a.stem;
    const cgl_status st = cgl_generate_dataset(model_of(a.model), a.p, a.n, a.seed, a.out_dir.c_str(), stem.c_str());
    if (st != CGL_OK) return fail(st);
    std::printf("wrote %s/%s_{Y,sigma,S}.csv and %s.meta\n", a.out_dir.c_str(), stem.c_str(), stem.c_str());
    return exit_ok;
}

struct SolveArgs
{
    std::string input;
    bool input_is_data = false;
    double rho = 0.0;
    std::string penalty;
    std::string solver = "cd";
    std::string init = "full";
    double tol = 1e-3;
    int max_iters = 500;
    std::string out;
    std::string trace_out;
};

int run_solve(const SolveArgs& a)
{
    cgl_matrix* raw = nullptr;
    cgl_status st = cgl_matrix_read_csv(a.input.c_str(), &raw);
    if (st != CGL_OK) return fail(st);
    MatrixPtr s(raw);
    if (a.input_is_data) {
        st = cgl_sample_covariance(s.get(), 0, &raw);
        if (st != CGL_OK) return fail(st);
        s.reset(raw);
    }

    MatrixPtr penalty;
    if (!a.penalty.empty()) {
        st = cgl_matrix_read_csv(a.penalty.c_str(), &raw);
        if (st != CGL_OK) return fail(st);
        penalty.reset(raw);
    }

    cgl_options opts;
    cgl_options_default(&opts);
    opts.outer_tol = a.tol;
    opts.max_outer_iters = a.max_iters;
    MatrixPtr custom;
    if (a.init == "full") {
        opts.init = CGL_INIT_FULL;
    } else if (a.init == "diag") {
        opts.init = CGL_INIT_DIAG;
    } else if (a.init.rfind("custom:", 0) == 0) {
        st = cgl_matrix_read_csv(a.init.substr(7).c_str(), &raw);
        if (st != CGL_OK) return fail(st);
        custom.reset(raw);
        opts.init = CGL_INIT_CUSTOM;
        opts.custom_init = custom.get();
    } else {
        std::fprintf(stderr, "error: --init must be full, diag or custom:PATH\n");
        return exit_usage;
    }

    cgl_result* res_raw = nullptr;
    st = cgl_solve(s.get(), a.solver == "ecm" ? CGL_SOLVER_ECM : CGL_SOLVER_CD, a.rho, penalty.get(), &opts, &res_raw);
    if (st != CGL_OK) return fail(st);
    ResultPtr res(res_raw);

    const size_t len = cgl_result_trace_length(res.get());
    const double* trace = cgl_result_trace(res.get());
    std::printf("solver=%s rho=%g iterations=%d converged=%s objective=%.10g nonzero_fraction=%.6f wall_time_s=%.6f\n",
                a.solver.c_str(), a.rho, cgl_result_iterations(res.get()),
                cgl_result_converged(res.get()) ? "yes" : "no", len ? trace[len - 1] : 0.0,
                cgl_result_nonzero_fraction(res.get()), cgl_result_wall_time(res.get()));

    if (!a.out.empty()) {
        st = cgl_result_sigma(res.get(), &raw);
        if (st != CGL_OK) return fail(st);
        MatrixPtr sigma(raw);
        st = cgl_matrix_write_csv(sigma.get(), a.out.c_str());
        if (st != CGL_OK) return fail(st);
    }
    if (!a.trace_out.empty()) {
        st = cgl_matrix_create(len, 1, trace, &raw);
        if (st != CGL_OK) return fail(st);
        MatrixPtr t(raw);
        st = cgl_matrix_write_csv(t.get(), a.trace_out.c_str());
        if (st != CGL_OK) return fail(st);
    }
    return exit_ok;
}

struct SweepArgs
{
    std::string plan;
    std::string out_dir = "report";
    int threads = 0;
};

int run_sweep(const SweepArgs& a)
{
    const cgl_status st = cgl_run_sweep(a.plan.c_str(), a.out_dir.c_str(), a.threads);
    if (st != CGL_OK) return fail(st);
    std::printf("report written to %s\n", a.out_dir.c_str());
    return exit_ok;
}

int run_verify()
{
    int failures = 0;
    const cgl_status st = cgl_verify(
        [](const char* name, int passed, const char* detail, void*) {
            std::printf("%s %s: %s\n", passed ? "PASS" : "FAIL", name, detail);
        },
        nullptr, &failures);
    if (st != CGL_OK) return fail(st);
    std::printf("%d check(s) failed\n", failures);
    return failures == 0 ? exit_ok : exit_numerical;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sparse covariance estimation with the covariance graphical lasso"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(cgl_version()));

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Sample a synthetic dataset and write it to CSV files");
    generate->add_option("--model", gen.model, "sparse or dense")->check(CLI::IsMember({"sparse", "dense"}));
    generate->add_option("-p,--p", gen.p, "Dimension")->check(CLI::PositiveNumber);
    generate->add_option("-n,--n", gen.n, "Number of observations")->check(CLI::PositiveNumber);
    generate->add_option("--seed", gen.seed, "Random seed");
    generate->add_option("--out-dir", gen.out_dir, "Output directory");
    generate->add_option("--stem", gen.stem, "File name stem");

    SolveArgs sol;
    auto* solve = app.add_subcommand("solve", "Estimate a sparse covariance matrix");
    solve->add_option("--input", sol.input, "Sample covariance CSV")->required();
    solve->add_flag("--data", sol.input_is_data, "Treat --input as an n x p data matrix");
    auto* rho_opt = solve->add_option("--rho", sol.rho, "Penalty parameter")->check(CLI::NonNegativeNumber);
    solve->add_option("--penalty", sol.penalty, "Penalty matrix CSV")->excludes(rho_opt);
    solve->add_option("--solver", sol.solver, "cd or ecm")->check(CLI::IsMember({"cd", "ecm"}));
    solve->add_option("--init", sol.init, "full, diag or custom:PATH");
    solve->add_option("--tol", sol.tol, "Stop when the objective changes by less than this")
        ->check(CLI::PositiveNumber);
    solve->add_option("--max-iters", sol.max_iters, "Maximum outer iterations")->check(CLI::PositiveNumber);
    solve->add_option("--out", sol.out, "Write the estimate to this CSV");
    solve->add_option("--trace-out", sol.trace_out, "Write the objective trace to this CSV");

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Run a benchmark plan and write the report CSVs");
    sweep->add_option("--plan", sw.plan, "Plan file (key=value)")->required();
    sweep->add_option("--out-dir", sw.out_dir, "Report directory");
    sweep->add_option("--threads", sw.threads, "Worker threads (overrides the plan)")->check(CLI::NonNegativeNumber);

    auto* verify = app.add_subcommand("verify", "Run the reference checks");
    verify->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    if (*generate) return run_generate(gen);
    if (*solve) return run_solve(sol);
    if (*sweep) return run_sweep(sw);
    if (*verify) return run_verify();
    return exit_usage;
}
