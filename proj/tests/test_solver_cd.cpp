#include "support.hpp"

#include <covglasso/core.hpp>
#include <covglasso/errors.hpp>
#include <covglasso/oracle.hpp>
#include <covglasso/solver_cd.hpp>
#include <covglasso/synthetic.hpp>

#include <doctest.h>

#include <cmath>

using namespace covglasso;

namespace {

Matrix mat2(double a, double b, double c)
{
    Matrix m(2, 2);
    m << a, b, b, c;
    return m;
}

std::vector<long double> vec(const Vector& v) { return {v.data(), v.data() + v.size()}; }

// a straight from its definition, through the reference inverse.
long double reference_a(const Matrix& sigma, const Matrix& s, Index pivot, const Vector& b)
{
    const auto sp = partition(sigma, pivot);
    const auto ss = partition(s, pivot);
    const ref::Mat x = ref::inverse(ref::from(sp.m11));
    const ref::Mat quad = ref::mul(ref::mul(x, ref::from(ss.m11)), x);
    long double out = ss.m22;
    for (Index i = 0; i < b.size(); ++i) {
        long double xs = 0.0L;
        for (Index k = 0; k < b.size(); ++k) {
            out += b(i) * quad[i][k] * b(k);
            xs += x[i][k] * ss.m12(k);
        }
        out -= 2.0L * xs * b(i);
    }
    return out;
}

} // namespace

TEST_CASE("compute a examples")
{
    const ColumnPartition part = partition_column(CovarianceMatrix(mat2(1.0, 0.3, 1.0)),
                                                  CovarianceMatrix(mat2(1.0, 1.0, 1.0)), 1);
    CHECK(compute_a(Vector::Zero(1), part) == doctest::Approx(1.0));
    Vector b(1);
    b << 1.0;
    CHECK(std::fabs(compute_a(b, part)) < 1e-15);
}

TEST_CASE("compute a equals the regression residual norm")
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Index p = 5, n = 9;
        const Matrix y = testing::random_matrix(n, p, seed);
        const CovarianceMatrix s = sample_covariance(y);
        const CovarianceMatrix sigma(testing::random_spd(p, seed + 40));
        const Vector b = testing::random_matrix(p - 1, 1, seed + 80).col(0);
        const Index pivot = static_cast<Index>(seed % p);
        const auto part = partition_column(sigma, s, pivot);
        const auto idx = complement_indices(p, pivot);

        const Vector coef = part.sigma.m11.llt().solve(b);
        const Vector resid = y.col(pivot) - y(Eigen::all, idx) * coef;
        const double want = resid.squaredNorm() / n;
        const double got = compute_a(b, part);
        CHECK(got >= 0.0);
        CHECK(got == doctest::Approx(want).epsilon(1e-10));
        CHECK(got == doctest::Approx(static_cast<double>(reference_a(sigma.matrix(), s.matrix(), pivot, b))).epsilon(1e-10));
    }
}

TEST_CASE("gamma update")
{
    CHECK(gamma_update(2.0, 0.0) == 2.0);
    CHECK(gamma_update(2.0, 0.5) == doctest::Approx(std::sqrt(5.0) - 1.0).epsilon(1e-14));
    CHECK(gamma_update(5.0, 2.0) == doctest::Approx((-1.0 + std::sqrt(41.0)) / 4.0).epsilon(1e-14));
    CHECK(std::fabs(gamma_update(2.0, 0.5) - oracle::oracle_gamma(2.0, 0.5)) < 1e-8);
    CHECK(gamma_update(1.0, 1e-14) == doctest::Approx(1.0).epsilon(1e-12));

    try {
        gamma_update(0.0, 1.0);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::degenerate_subproblem);
    }
}

TEST_CASE("gamma update is the minimizer of the scalar problem")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ua(1e-3, 10.0), ur(0.0, 5.0);
    for (int k = 0; k < 200; ++k) {
        const double a = ua(rng), rho = ur(rng);
        const double g = gamma_update(a, rho);
        CHECK(g > 0.0);
        // first-order condition 1/g - a/g^2 + rho = 0
        CHECK(std::fabs(1.0 / g - a / (g * g) + rho) < 1e-9 * (1.0 + a / (g * g)));
    }
}

TEST_CASE("lasso subproblem examples")
{
    const CovarianceMatrix id = CovarianceMatrix::identity(3);
    const auto part = partition_column(id, id, 2);
    const auto sub0 = build_lasso_subproblem(part, 1.0, 0.0);
    CHECK(sub0.v.isApprox(Matrix::Identity(2, 2)));
    const auto sub1 = build_lasso_subproblem(part, 2.0, 1.0);
    CHECK(sub1.v.isApprox(1.5 * Matrix::Identity(2, 2)));
    CHECK(sub1.lambda == Vector::Constant(2, 1.0));
    CHECK_THROWS_AS(build_lasso_subproblem(part, 0.0, 1.0), Error);
}

TEST_CASE("lasso subproblem matches its definition and is positive definite")
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Index p = 3 + static_cast<Index>(seed % 5);
        const CovarianceMatrix sigma(testing::random_spd(p, seed));
        const CovarianceMatrix s(testing::random_spd(p, seed + 1000));
        const double gamma = 0.3 + 0.1 * static_cast<double>(seed), rho = 0.05 * static_cast<double>(seed);
        const auto part = partition_column(sigma, s, 0);
        const auto sub = build_lasso_subproblem(part, gamma, rho);
        CHECK((sub.v - sub.v.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(testing::cholesky_ok(sub.v));

        const ref::Mat x = ref::inverse(ref::from(part.sigma.m11));
        const ref::Mat quad = ref::mul(ref::mul(x, ref::from(part.s.m11)), x);
        for (Index i = 0; i < p - 1; ++i) {
            long double ui = 0.0L;
            for (Index j = 0; j < p - 1; ++j) {
                const long double vij = quad[i][j] / gamma + rho * x[i][j];
                CHECK(std::fabs(sub.v(i, j) - static_cast<double>(vij)) < 1e-10 * (1.0 + std::fabs(sub.v(i, j))));
                ui += x[i][j] * part.s.m12(j);
            }
            CHECK(std::fabs(sub.u(i) - static_cast<double>(ui / gamma)) < 1e-10 * (1.0 + std::fabs(sub.u(i))));
        }
    }
}

TEST_CASE("lasso inner examples")
{
    const SolverConfig cfg;
    LassoSubproblem sub{Matrix::Identity(2, 2), Vector(2), Vector::Constant(2, 1.0)};
    sub.u << 3.0, -0.2;
    auto sol = lasso_inner(sub, Vector::Zero(2), cfg);
    CHECK(sol.converged);
    CHECK(sol.beta(0) == doctest::Approx(2.0));
    CHECK(sol.beta(1) == 0.0);

    sub.lambda.setZero();
    sub.u << 0.7, -1.3;
    sol = lasso_inner(sub, Vector::Zero(2), cfg);
    CHECK((sol.beta - sub.u).cwiseAbs().maxCoeff() < 1e-12);

    LassoSubproblem coupled{mat2(1.0, 0.3, 1.0), Vector::Ones(2), Vector::Constant(2, 0.2)};
    sol = lasso_inner(coupled, Vector::Zero(2), cfg);
    CHECK(sol.converged);
    const auto kkt = ref::lasso_kkt_violation(ref::from(coupled.v), vec(coupled.u), vec(coupled.lambda), vec(sol.beta));
    CHECK(kkt < 1e-6);
}

TEST_CASE("lasso inner satisfies the optimality conditions on random problems")
{
    SolverConfig cfg;
    cfg.inner_tol = 1e-12;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const Index m = 2 + static_cast<Index>(seed % 8);
        const Matrix v = testing::random_spd(m, seed);
        const Vector u = testing::random_matrix(m, 1, seed + 7).col(0);
        const Vector lambda = Vector::Constant(m, 0.1 * static_cast<double>(seed % 6));
        const LassoSubproblem sub{v, u, lambda};
        const Vector beta0 = testing::random_matrix(m, 1, seed + 9).col(0);
        const auto sol = lasso_inner(sub, beta0, cfg);
        CHECK(sol.converged);
        CHECK(ref::lasso_kkt_violation(ref::from(v), vec(u), vec(lambda), vec(sol.beta)) < 1e-8);
    }
}

TEST_CASE("lasso inner reports hitting the sweep cap")
{
    SolverConfig cfg;
    cfg.max_inner_iters = 1;
    cfg.inner_tol = 1e-15;
    const LassoSubproblem sub{mat2(1.0, 0.9, 1.0), Vector::Ones(2), Vector::Zero(2)};
    const auto sol = lasso_inner(sub, Vector::Zero(2), cfg);
    CHECK_FALSE(sol.converged);
    CHECK(sol.sweeps == 1);
}

TEST_CASE("column update")
{
    SUBCASE("large penalty zeroes the off-diagonal in one update")
    {
        const CovarianceMatrix s = CovarianceMatrix::identity(2);
        const CovarianceMatrix sigma(mat2(1.0, 0.3, 1.0));
        const auto part = partition_column(sigma, s, 1);
        const double gamma = gamma_update(compute_a(part.sigma.m12, part), 10.0);
        const auto sub = build_lasso_subproblem(part, gamma, 10.0);
        CHECK(std::fabs(sub.u(0)) <= 10.0);
        const auto next = cd_column_update(sigma, s, 1, 10.0, {});
        CHECK(next(0, 1) == 0.0);
        CHECK(next(1, 0) == 0.0);
    }

    SUBCASE("objective does not increase and positive definiteness holds")
    {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const Index p = 4;
            const CovarianceMatrix s = testing::random_sample_covariance(p, 10, seed);
            CovarianceMatrix sigma(testing::random_spd(p, seed + 300));
            const double rho = 0.05 * static_cast<double>(seed % 5);
            for (Index i = 0; i < p; ++i) {
                const double before = objective(sigma, s, rho);
                sigma = cd_column_update(sigma, s, i, rho, {});
                CHECK(sigma.is_positive_definite());
                CHECK(objective(sigma, s, rho) <= before + 1e-10);
            }
        }
    }

    SUBCASE("unpenalized update minimizes over b at the updated gamma")
    {
        const Index p = 4;
        const CovarianceMatrix s = testing::random_sample_covariance(p, 12, 5);
        const CovarianceMatrix sigma(testing::random_spd(p, 6));
        const auto next = cd_column_update(sigma, s, 2, 0.0, {});
        const auto part = partition(next.matrix(), 2);
        const auto point = to_reparam(part);
        const double g0 = objective(next, s, 0.0);
        std::mt19937_64 rng(1);
        std::normal_distribution<double> z;
        for (int k = 0; k < 20; ++k) {
            Vector d(p - 1);
            for (auto& v : d) v = z(rng);
            for (double eps : {1e-4, -1e-4}) {
                ReparamPoint moved{point.b + eps * d, point.gamma};
                const CovarianceMatrix trial(reassemble(from_reparam(part.m11, moved, 2)), 1e-12);
                CHECK(objective(trial, s, 0.0) >= g0 - 1e-12);
            }
        }
    }

    SUBCASE("an optimal point is a fixed point")
    {
        const CovarianceMatrix s = testing::random_sample_covariance(4, 12, 8);
        SolverConfig cfg;
        cfg.outer_tol = 1e-13;
        cfg.inner_tol = 1e-13;
        const auto res = solve_cd(s, 0.1, cfg);
        const auto again = cd_column_update(res.sigma_hat, s, 3, 0.1, cfg);
        CHECK((again.matrix() - res.sigma_hat.matrix()).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("solve cd recovers S without a penalty")
{
    for (Index p : {3, 10}) {
        const CovarianceMatrix s = testing::random_sample_covariance(p, 3 * p, static_cast<std::uint64_t>(p));
        SolverConfig cfg;
        cfg.outer_tol = 1e-12;
        for (auto init : {InitStrategy::full(), InitStrategy::diagonal()}) {
            cfg.init = init;
            const auto res = solve_cd(s, 0.0, cfg);
            CHECK((res.sigma_hat.matrix() - s.matrix()).cwiseAbs().maxCoeff() < 1e-6);
        }
    }
}

TEST_CASE("solve cd with a large penalty is diagonal")
{
    const auto data = generate_dataset({ModelKind::sparse_tridiagonal, 10, 20, 3});
    const auto res = solve_cd(data.s, 50.0);
    CHECK(res.converged);
    CHECK(res.nonzero_fraction == 0.0);
    const Matrix& m = res.sigma_hat.matrix();
    CHECK((m - Matrix(m.diagonal().asDiagonal())).isZero(0.0));
}

TEST_CASE("solve cd trace, iterates and stopping rule")
{
    const CovarianceMatrix s = testing::random_sample_covariance(8, 16, 21);
    std::vector<Matrix> iterates;
    const auto res = solve_cd(s, 0.1, {}, [&](int, const Matrix& m) { iterates.push_back(m); });
    CHECK(res.converged);
    CHECK(res.objective_trace.size() == static_cast<std::size_t>(res.outer_iters) + 1);
    CHECK(iterates.size() == static_cast<std::size_t>(res.outer_iters));
    CHECK(res.objective_trace.front() == doctest::Approx(objective(s, s, 0.1)));
    for (std::size_t k = 1; k < res.objective_trace.size(); ++k)
        CHECK(res.objective_trace[k] <= res.objective_trace[k - 1] + 1e-10);
    for (const auto& m : iterates) CHECK(testing::cholesky_ok(m));
    const auto n = res.objective_trace.size();
    CHECK(std::fabs(res.objective_trace[n - 1] - res.objective_trace[n - 2]) < 1e-3);
    CHECK(res.objective_trace.back() == doctest::Approx(objective(res.sigma_hat, s, 0.1)).epsilon(1e-12));
    CHECK(res.wall_time >= 0.0);
}

TEST_CASE("solve cd stops at the iteration cap")
{
    SolverConfig cfg;
    cfg.max_outer_iters = 1;
    cfg.outer_tol = 1e-14;
    const auto res = solve_cd(testing::random_sample_covariance(6, 12, 4), 0.05, cfg);
    CHECK_FALSE(res.converged);
    CHECK(res.outer_iters == 1);
}

TEST_CASE("scalar and constant matrix penalties give identical results")
{
    const CovarianceMatrix s = testing::random_sample_covariance(7, 14, 77);
    const auto a = solve_cd(s, 0.2);
    const auto b = solve_cd(s, PenaltySpec(Matrix::Constant(7, 7, 0.2)));
    CHECK(a.sigma_hat.matrix() == b.sigma_hat.matrix());
    CHECK(a.objective_trace == b.objective_trace);
}

TEST_CASE("element-wise penalty leaves unpenalized pairs free")
{
    const CovarianceMatrix s = testing::random_sample_covariance(4, 40, 12);
    Matrix w = Matrix::Constant(4, 4, 100.0);
    w(0, 1) = w(1, 0) = 0.0;
    const auto res = solve_cd(s, PenaltySpec(w));
    CHECK(res.sigma_hat(0, 1) != 0.0);
    CHECK(res.sigma_hat(0, 2) == 0.0);
    CHECK(res.sigma_hat(2, 3) == 0.0);
}

TEST_CASE("p = 1 has a closed form")
{
    Matrix s(1, 1);
    s << 2.0;
    const auto res = solve_cd(CovarianceMatrix(s), 0.5);
    CHECK(res.sigma_hat(0, 0) == doctest::Approx(gamma_update(2.0, 0.5)));
}

TEST_CASE("solve cd input errors")
{
    const auto expect = [](auto fn, ErrorKind kind) {
        try {
            fn();
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == kind);
        }
    };

    SolverConfig cfg;
    cfg.init = InitStrategy::from(mat2(1.0, 2.0, 1.0));
    expect([&] { solve_cd(CovarianceMatrix::identity(2), 0.1, cfg); }, ErrorKind::invalid_input);

    // singular S with no penalty
    expect([&] { solve_cd(CovarianceMatrix(mat2(1.0, 1.0, 1.0)), 0.0); }, ErrorKind::invalid_input);

    // a zero column of S collapses gamma
    Matrix z = Matrix::Identity(3, 3);
    z(2, 2) = 0.0;
    cfg = {};
    cfg.init = InitStrategy::from(Matrix::Identity(3, 3));
    try {
        solve_cd(CovarianceMatrix(z), 0.5, cfg);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::degenerate_subproblem);
        REQUIRE(e.column().has_value());
        CHECK(*e.column() == 2);
    }

    expect([&] { solve_cd(CovarianceMatrix::identity(3), PenaltySpec(Matrix::Ones(2, 2))); }, ErrorKind::invalid_input);
}

TEST_CASE("cd beats or matches the grid oracle on small problems")
{
    SolverConfig cfg;
    cfg.outer_tol = 1e-10;
    const CovarianceMatrix s(mat2(1.0, 0.5, 1.0));
    const auto res = solve_cd(s, 0.1, cfg);
    const auto report = oracle::oracle_small_problem(s, 0.1);
    CHECK(objective(res.sigma_hat, s, 0.1) <= report.best_value + 1e-3);
}
