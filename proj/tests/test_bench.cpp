#include "support.hpp"

#include <covglasso/bench.hpp>
#include <covglasso/core.hpp>
#include <covglasso/errors.hpp>
#include <covglasso/matrix_io.hpp>
#include <covglasso/solver_cd.hpp>

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace covglasso;
using namespace covglasso::bench;
namespace fs = std::filesystem;

namespace {

struct TempDir
{
    fs::path path;
    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() / ("covglasso_" + name + "_" + std::to_string(::getpid())))
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

std::vector<std::string> data_lines(const std::string& file)
{
    std::ifstream in(file);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line.front() != '#') out.push_back(line);
    return out;
}

ExperimentPlan small_plan()
{
    ExperimentPlan plan;
    plan.models = {{ModelKind::sparse_tridiagonal, 8, 16, 0}, {ModelKind::dense_compound, 8, 16, 0}};
    plan.replicate_seeds = {3};
    plan.rho_grid.count = 4;
    plan.inits = {Init::full, Init::diag};
    return plan;
}

RunRecord record(Solver solver, double rho, double objective, double pct = 0.5)
{
    RunRecord r;
    r.p = 10;
    r.n = 20;
    r.seed = 1;
    r.rho = rho;
    r.solver = solver;
    r.objective_value = objective;
    r.pct_nonzero = pct;
    r.converged = true;
    return r;
}

} // namespace

TEST_CASE("matrix csv round trip")
{
    TempDir dir("csv");
    const Matrix m = testing::random_matrix(4, 3, 1);
    io::write_matrix_csv(dir / "m.csv", m);
    CHECK(io::read_matrix_csv(dir / "m.csv") == m);

    std::istringstream ragged("1,2\n3\n");
    CHECK_THROWS_AS(io::read_matrix_csv(ragged), Error);
    std::istringstream junk("1,abc\n");
    CHECK_THROWS_AS(io::read_matrix_csv(junk), Error);
    std::istringstream blank("\n1, 2\n\n3,4\n");
    CHECK(io::read_matrix_csv(blank) == (Matrix(2, 2) << 1, 2, 3, 4).finished());

    try {
        io::read_matrix_csv(dir / "missing.csv");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::io);
    }
}

TEST_CASE("covariance csv rejects asymmetry beyond 1e-8")
{
    TempDir dir("cov");
    Matrix m = Matrix::Identity(2, 2);
    m(0, 1) = 0.5;
    m(1, 0) = 0.5 + 1e-10;
    io::write_matrix_csv(dir / "ok.csv", m);
    const auto c = io::read_covariance_csv(dir / "ok.csv");
    CHECK(c(0, 1) == c(1, 0));
    m(1, 0) = 0.5 + 1e-6;
    io::write_matrix_csv(dir / "bad.csv", m);
    CHECK_THROWS_AS(io::read_covariance_csv(dir / "bad.csv"), Error);
    io::write_matrix_csv(dir / "rect.csv", Matrix::Ones(2, 3));
    CHECK_THROWS_AS(io::read_covariance_csv(dir / "rect.csv"), Error);
}

TEST_CASE("dataset files")
{
    TempDir dir("data");
    const auto data = generate_dataset({ModelKind::sparse_tridiagonal, 5, 9, 42});
    const auto files = io::write_dataset(data, dir.path.string(), "x");
    CHECK(io::read_matrix_csv(files.y_path) == data.y);
    CHECK(io::read_matrix_csv(files.sigma_path) == data.sigma_true.matrix());
    CHECK(io::read_matrix_csv(files.s_path) == data.s.matrix());
    const auto meta = io::read_metadata(files.meta_path);
    CHECK(meta.at("kind") == "sparse");
    CHECK(meta.at("p") == "5");
    CHECK(meta.at("n") == "9");
    CHECK(meta.at("seed") == "42");
    CHECK(std::stod(meta.at("delta")) == sparse_model_delta(5));
}

TEST_CASE("rho grid")
{
    const auto data = generate_dataset({ModelKind::sparse_tridiagonal, 10, 20, 1});
    const SolverConfig cfg;
    const double top = diagonalizing_rho(data.s, cfg);
    CHECK(solve_cd(data.s, top, cfg).nonzero_fraction == 0.0);

    RhoGrid grid;
    const auto values = make_rho_grid(grid, data.s, cfg);
    REQUIRE(values.size() == 20);
    CHECK(values.back() == top);
    CHECK(values.front() == doctest::Approx(top * grid.min_ratio));
    for (std::size_t k = 1; k < values.size(); ++k) {
        CHECK(values[k] > values[k - 1]);
        CHECK(values[k] / values[k - 1] == doctest::Approx(values[1] / values[0]));
    }

    grid.values = {0.1, 0.2};
    CHECK(make_rho_grid(grid, data.s, cfg) == grid.values);
}

TEST_CASE("regularization path warm starts")
{
    const auto data = generate_dataset({ModelKind::dense_compound, 8, 16, 2});
    const std::vector<double> rhos{0.5, 0.2, 0.1};
    const auto path = regularization_path(data.s, rhos, Solver::cd, {});
    REQUIRE(path.size() == 3);
    CHECK(path[1].objective_trace.front()
          == doctest::Approx(objective(path[0].sigma_hat, data.s, 0.2)));
    for (std::size_t k = 1; k < path.size(); ++k)
        CHECK(path[k].nonzero_fraction >= path[k - 1].nonzero_fraction);
}

TEST_CASE("plan validation")
{
    ExperimentPlan plan;
    CHECK_THROWS_AS(plan.validate(), Error);
    plan = small_plan();
    CHECK_NOTHROW(plan.validate());
    plan.rho_grid.values = {0.2, 0.1};
    CHECK_THROWS_AS(plan.validate(), Error);
    plan.rho_grid.values = {-1.0};
    CHECK_THROWS_AS(plan.validate(), Error);
    plan = small_plan();
    plan.solvers.clear();
    CHECK_THROWS_AS(plan.validate(), Error);
}

TEST_CASE("plan file parsing")
{
    std::istringstream text(R"(# demo
models = sparse:10:20, dense:12:24
seeds = 1, 2
rho_count = 5
rho_min_ratio = 0.01
rho_max = auto
solvers = cd
inits = full, diag
outer_tol = 1e-4   # tighter
repeats = 3
threads = 2
)");
    const auto plan = parse_plan(text);
    REQUIRE(plan.models.size() == 2);
    CHECK(plan.models[1].kind == ModelKind::dense_compound);
    CHECK(plan.models[1].p == 12);
    CHECK(plan.models[1].n == 24);
    CHECK(plan.replicate_seeds == std::vector<std::uint64_t>{1, 2});
    CHECK(plan.rho_grid.count == 5);
    CHECK(plan.rho_grid.min_ratio == 0.01);
    CHECK(plan.rho_grid.max == 0.0);
    CHECK(plan.solvers == std::vector<Solver>{Solver::cd});
    CHECK(plan.inits.size() == 2);
    CHECK(plan.config.outer_tol == 1e-4);
    CHECK(plan.repeats == 3);
    CHECK(plan.threads == 2);

    std::istringstream unknown("models = sparse:4:8\nfoo = 1\n");
    CHECK_THROWS_AS(parse_plan(unknown), Error);
    std::istringstream bad_model("models = sparse:4\n");
    CHECK_THROWS_AS(parse_plan(bad_model), Error);
    std::istringstream no_eq("models sparse:4:8\n");
    CHECK_THROWS_AS(parse_plan(no_eq), Error);
}

TEST_CASE("experiment produces one record per cell")
{
    const auto plan = small_plan();
    const auto records = run_experiment(plan);
    CHECK(records.size() == 2 * 4 * 2 * 2);
    CHECK(std::is_sorted(records.begin(), records.end(), record_less));
    for (const auto& r : records) {
        CHECK(r.error.empty());
        CHECK(std::isfinite(r.objective_value));
        CHECK(r.pct_nonzero >= 0.0);
        CHECK(r.pct_nonzero <= 1.0);
    }
}

TEST_CASE("experiment is deterministic apart from timing, including with threads")
{
    auto plan = small_plan();
    const auto a = run_experiment(plan);
    plan.threads = 3;
    const auto b = run_experiment(plan);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].rho == b[k].rho);
        CHECK(a[k].solver == b[k].solver);
        CHECK(a[k].init == b[k].init);
        CHECK(a[k].objective_value == b[k].objective_value);
        CHECK(a[k].pct_nonzero == b[k].pct_nonzero);
        CHECK(a[k].outer_iters == b[k].outer_iters);
    }
}

TEST_CASE("zero penalty cell reproduces S")
{
    ExperimentPlan plan;
    plan.models = {{ModelKind::dense_compound, 6, 30, 0}};
    plan.replicate_seeds = {5};
    plan.rho_grid.values = {0.0};
    plan.solvers = {Solver::cd};
    plan.config.outer_tol = 1e-12;
    const auto records = run_experiment(plan);
    REQUIRE(records.size() == 1);
    const auto data = generate_dataset({ModelKind::dense_compound, 6, 30, 5});
    CHECK(records[0].objective_value == doctest::Approx(objective(data.s, data.s, 0.0)).epsilon(1e-10));
    CHECK(records[0].pct_nonzero == nonzero_fraction(data.s.matrix(), 0.0));
}

TEST_CASE("large penalty gives a diagonal cd estimate")
{
    ExperimentPlan plan;
    plan.models = {{ModelKind::sparse_tridiagonal, 10, 20, 0}};
    plan.rho_grid.values = {100.0};
    plan.solvers = {Solver::cd};
    plan.inits = {Init::diag};
    const auto records = run_experiment(plan);
    REQUIRE(records.size() == 1);
    CHECK(records[0].pct_nonzero == 0.0);
}

TEST_CASE("cd is not worse than ecm at a moderate penalty")
{
    ExperimentPlan plan;
    plan.models = {{ModelKind::sparse_tridiagonal, 20, 40, 0}};
    plan.replicate_seeds = {7};
    plan.rho_grid.values = {0.2};
    const auto rel = relative_objective(run_experiment(plan));
    REQUIRE(rel.rows.size() == 1);
    CHECK(rel.rows[0].value <= 0.05);
}

TEST_CASE("a failing cell does not disturb the others")
{
    ExperimentPlan plan;
    plan.models = {{ModelKind::sparse_tridiagonal, 12, 6, 0}, // n < p: S is singular
                   {ModelKind::dense_compound, 8, 16, 0}};
    plan.replicate_seeds = {2};
    plan.solvers = {Solver::cd};
    plan.inits = {Init::diag};
    plan.rho_grid.values = {0.0, 0.3};
    const auto with_failure = run_experiment(plan);
    REQUIRE(with_failure.size() == 4);

    plan.models.erase(plan.models.begin());
    const auto alone = run_experiment(plan);
    REQUIRE(alone.size() == 2);

    int failed = 0;
    for (const auto& r : with_failure) {
        if (r.model == ModelKind::sparse_tridiagonal) {
            ++failed;
            CHECK_FALSE(r.error.empty());
            CHECK_FALSE(r.converged);
            CHECK(std::isnan(r.objective_value));
            continue;
        }
        const auto twin = std::find_if(alone.begin(), alone.end(), [&](const RunRecord& o) { return o.rho == r.rho; });
        REQUIRE(twin != alone.end());
        CHECK(r.error.empty());
        CHECK(r.objective_value == twin->objective_value);
        CHECK(r.pct_nonzero == twin->pct_nonzero);
        CHECK(r.outer_iters == twin->outer_iters);
    }
    CHECK(failed == 2);
}

TEST_CASE("relative objective")
{
    std::vector<RunRecord> same{record(Solver::cd, 0.1, 5.0), record(Solver::ecm, 0.1, 5.0)};
    auto rel = relative_objective(same);
    REQUIRE(rel.rows.size() == 1);
    CHECK(rel.rows[0].value == 0.0);
    CHECK(rel.rows[0].cd_nonzero_edges == nonzero_edges(0.5, 10));

    std::vector<RunRecord> better{record(Solver::cd, 0.1, 4.9), record(Solver::ecm, 0.1, 5.0)};
    CHECK(relative_objective(better).rows[0].value < 0.0);

    std::vector<RunRecord> lonely{record(Solver::cd, 0.1, 4.9), record(Solver::ecm, 0.2, 5.0)};
    rel = relative_objective(lonely);
    CHECK(rel.rows.empty());
    CHECK(rel.warnings.size() == 2);

    CHECK(nonzero_edges(1.0, 10) == 45);
    CHECK(nonzero_edges(0.0, 10) == 0);
}

TEST_CASE("report files")
{
    TempDir dir("report");
    const std::vector<RunRecord> one{record(Solver::cd, 0.1, 5.0)};
    const auto files = emit_report(one, dir / "one");
    const auto lines = data_lines(files.runs);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == runs_header);

    std::ifstream raw(files.runs);
    std::string first;
    std::getline(raw, first);
    CHECK(first.rfind("#", 0) == 0);
    CHECK(first.find("0.0001") != std::string::npos);

    std::vector<RunRecord> two{record(Solver::cd, 0.1, 5.0), record(Solver::ecm, 0.1, 5.1),
                               record(Solver::cd, 0.2, 6.0), record(Solver::ecm, 0.2, 6.0)};
    const auto files2 = emit_report(two, dir / "two");
    CHECK(data_lines(files2.relobj_vs_nonzeros).size() == 1 + 2);
    CHECK(data_lines(files2.time_vs_nonzeros).size() == 1 + 4);
    CHECK(data_lines(files2.status).size() == 1 + 4);

    CHECK_THROWS_AS(emit_report({}, dir / "none"), Error);

    std::ofstream(dir / "blocker") << "x";
    try {
        emit_report(one, dir / "blocker");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::io);
    }
}

TEST_CASE("report round trip keeps every non-timing field")
{
    TempDir dir("roundtrip");
    auto plan = small_plan();
    plan.models.push_back({ModelKind::sparse_tridiagonal, 12, 6, 0});
    plan.rho_grid.values = {0.0, 0.4};
    auto records = run_experiment(plan);
    emit_report(records, dir.path.string());
    const auto back = read_report(dir.path.string());
    REQUIRE(back.size() == records.size());
    bool saw_error = false;
    for (std::size_t k = 0; k < records.size(); ++k) {
        const auto& a = records[k];
        const auto& b = back[k];
        CHECK(a.model == b.model);
        CHECK(a.p == b.p);
        CHECK(a.n == b.n);
        CHECK(a.seed == b.seed);
        CHECK(a.rho == b.rho);
        CHECK(a.solver == b.solver);
        CHECK(a.init == b.init);
        CHECK(a.outer_iters == b.outer_iters);
        CHECK(a.pct_nonzero == b.pct_nonzero);
        CHECK(a.converged == b.converged);
        CHECK(a.error == b.error);
        if (std::isnan(a.objective_value)) {
            saw_error = true;
            CHECK(std::isnan(b.objective_value));
        } else {
            CHECK(a.objective_value == b.objective_value);
        }
    }
    CHECK(saw_error);
}
