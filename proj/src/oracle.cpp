#include <covglasso/oracle.hpp>

#include <covglasso/core.hpp>
#include <covglasso/solver_cd.hpp>
#include <covglasso/solver_ecm.hpp>

#include <Eigen/Cholesky>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace covglasso::oracle {

double golden_section_minimize(const std::function<double(double, double)>& diff,
                               double lo, double hi, double width)
{
    if (!(lo < hi) || !(width > 0.0)) throw_invalid("golden_section_minimize: bad bracket");
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    for (int iter = 0; iter < 10000 && b - a > width; ++iter) {
        if (diff(c, d) < 0.0) {
            b = d;
            d = c;
            c = b - inv_phi * (b - a);
        } else {
            a = c;
            c = d;
            d = a + inv_phi * (b - a);
        }
    }
    return 0.5 * (a + b);
}

double oracle_gamma(double a, double rho)
{
    if (!(a > 0.0) || !(rho >= 0.0)) throw_invalid("oracle_gamma: need a > 0 and rho >= 0");
    auto diff = [a, rho](double x, double y) {
        const double dx = x - y;
        return std::log1p(dx / y) - a * dx / (x * y) + rho * dx;
    };
    const double width = 1e-10;
    const double lo = 1e-8;
    double hi = a + 10.0 / std::max(rho, 1e-8);
    for (int attempt = 0; attempt <= 3; ++attempt) {
        const double x = golden_section_minimize(diff, lo, hi, width);
        if (x < hi - 10.0 * width) return x;
        hi *= 10.0;
    }
    throw_numerical("oracle_gamma: minimum not bracketed after 3 widenings");
}

namespace {

template <int P>
double small_objective(const Eigen::Matrix<double, P, P>& sigma,
                       const Eigen::Matrix<double, P, P>& s,
                       const Eigen::Matrix<double, P, P>& pen, bool& pd)
{
    Eigen::LLT<Eigen::Matrix<double, P, P>> llt(sigma);
    if (llt.info() != Eigen::Success) {
        pd = false;
        return std::numeric_limits<double>::infinity();
    }
    const auto& l = llt.matrixLLT();
    for (int k = 0; k < P; ++k) {
        if (!(l(k, k) > 0.0)) {
            pd = false;
            return std::numeric_limits<double>::infinity();
        }
    }
    pd = true;
    const double logdet = 2.0 * l.diagonal().array().log().sum();
    return logdet + llt.solve(s).trace() + (pen.array() * sigma.array().abs()).sum();
}

struct Axis
{
    double lo;
    double hi;
};

OracleReport finish(const Matrix& best, const Matrix& s, const Matrix& pen, long evals, double res)
{
    OracleReport rep;
    rep.best_point = CovarianceMatrix(best);
    rep.best_value = objective(best, s, pen);
    rep.evaluations = evals;
    rep.resolution = res;
    return rep;
}

OracleReport grid_p2(const Matrix& s, const Matrix& pen, const GridOptions& opt)
{
    using M2 = Eigen::Matrix2d;
    const M2 s2 = s;
    const M2 p2 = pen;
    const double r = std::sqrt(s(0, 0) * s(1, 1));
    std::array<Axis, 3> box{Axis{1e-3 * s(0, 0), 2.0 * s(0, 0)},
                            Axis{1e-3 * s(1, 1), 2.0 * s(1, 1)},
                            Axis{s(0, 1) - r, s(0, 1) + r}};
    const int n = std::max(opt.points_per_axis, 3);

    M2 best = M2::Zero();
    double best_val = std::numeric_limits<double>::infinity();
    long evals = 0;
    std::array<double, 3> spacing{};

    for (int level = 0; level <= opt.refinements; ++level) {
        for (int k = 0; k < 3; ++k) spacing[k] = (box[k].hi - box[k].lo) / (n - 1);
        for (int i0 = 0; i0 < n; ++i0) {
            const double d0 = box[0].lo + i0 * spacing[0];
            if (d0 <= 0.0) continue;
            for (int i1 = 0; i1 < n; ++i1) {
                const double d1 = box[1].lo + i1 * spacing[1];
                if (d1 <= 0.0) continue;
                for (int i2 = 0; i2 < n; ++i2) {
                    const double off = box[2].lo + i2 * spacing[2];
                    M2 sigma;
                    sigma << d0, off, off, d1;
                    bool pd = false;
                    const double v = small_objective<2>(sigma, s2, p2, pd);
                    ++evals;
                    if (pd && v < best_val) {
                        best_val = v;
                        best = sigma;
                    }
                }
            }
        }
        if (!std::isfinite(best_val)) throw_domain("oracle_small_problem: no positive definite grid point in box");
        const std::array<double, 3> center{best(0, 0), best(1, 1), best(0, 1)};
        for (int k = 0; k < 3; ++k) {
            const double half = 0.5 * (n - 1) * spacing[k] / opt.refine_factor;
            box[k] = {center[k] - half, center[k] + half};
        }
    }
    const double res = std::max({spacing[0], spacing[1], spacing[2]});
    return finish(best, s, pen, evals, res);
}

OracleReport pattern_p3(const Matrix& s, const Matrix& pen, const GridOptions& opt)
{
    using M3 = Eigen::Matrix3d;
    const M3 s3 = s;
    const M3 p3 = pen;
    // free coordinates: (0,0), (1,1), (2,2), (0,1), (0,2), (1,2)
    constexpr std::array<std::array<int, 2>, 6> coords{{{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}}};
    std::array<Axis, 6> box{};
    for (int k = 0; k < 6; ++k) {
        const int i = coords[k][0];
        const int j = coords[k][1];
        if (i == j) {
            box[k] = {1e-3 * s(i, i), 2.0 * s(i, i)};
        } else {
            const double r = std::sqrt(s(i, i) * s(j, j));
            box[k] = {s(i, j) - r, s(i, j) + r};
        }
    }
    auto to_matrix = [&](const std::array<double, 6>& x) {
        M3 m;
        for (int k = 0; k < 6; ++k) {
            m(coords[k][0], coords[k][1]) = x[k];
            m(coords[k][1], coords[k][0]) = x[k];
        }
        return m;
    };

    const int n = std::max(opt.coarse_points_p3, 3);
    std::array<double, 6> step{};
    for (int k = 0; k < 6; ++k) step[k] = (box[k].hi - box[k].lo) / (n - 1);

    std::array<double, 6> best{};
    double best_val = std::numeric_limits<double>::infinity();
    long evals = 0;
    std::array<int, 6> idx{};
    long total = 1;
    for (int k = 0; k < 6; ++k) total *= n;
    for (long flat = 0; flat < total; ++flat) {
        long rest = flat;
        for (int k = 5; k >= 0; --k) {
            idx[k] = static_cast<int>(rest % n);
            rest /= n;
        }
        std::array<double, 6> x{};
        for (int k = 0; k < 6; ++k) x[k] = box[k].lo + idx[k] * step[k];
        bool pd = false;
        const double v = small_objective<3>(to_matrix(x), s3, p3, pd);
        ++evals;
        if (pd && v < best_val) {
            best_val = v;
            best = x;
        }
    }
    if (!std::isfinite(best_val)) throw_domain("oracle_small_problem: no positive definite grid point in box");

    double h = *std::max_element(step.begin(), step.end());
    while (h > opt.pattern_min_step) {
        bool improved = false;
        for (int k = 0; k < 6; ++k) {
            for (double sign : {1.0, -1.0}) {
                auto x = best;
                x[k] += sign * h;
                bool pd = false;
                const double v = small_objective<3>(to_matrix(x), s3, p3, pd);
                ++evals;
                if (pd && v < best_val) {
                    best_val = v;
                    best = x;
                    improved = true;
                }
            }
        }
        if (!improved) h *= 0.5;
    }
    return finish(to_matrix(best), s, pen, evals, h);
}

} // namespace

OracleReport oracle_small_problem(const CovarianceMatrix& s, const PenaltySpec& penalty,
                                  const GridOptions& options)
{
    const Index p = s.dim();
    if (p != 2 && p != 3) throw_invalid("oracle_small_problem: p must be 2 or 3");
    if (s(0, 0) <= 0.0 || s(1, 1) <= 0.0 || s(p - 1, p - 1) <= 0.0) {
        throw_invalid("oracle_small_problem: S needs a positive diagonal");
    }
    const Matrix pen = penalty.expand(p);
    return p == 2 ? grid_p2(s.matrix(), pen, options) : pattern_p3(s.matrix(), pen, options);
}

double check_stationarity(const CovarianceMatrix& sigma_hat, const CovarianceMatrix& s,
                          const PenaltySpec& penalty, double step)
{
    if (!(step > 0.0)) throw_invalid("check_stationarity: step must be > 0");
    const Index p = sigma_hat.dim();
    const Matrix pen = penalty.expand(p);
    const Matrix& base = sigma_hat.matrix();
    const double g0 = objective(base, s.matrix(), pen);

    double worst = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i <= j; ++i) {
            for (double sign : {1.0, -1.0}) {
                double h = step;
                for (int attempt = 0;; ++attempt) {
                    Matrix moved = base;
                    moved(i, j) += sign * h;
                    if (i != j) moved(j, i) += sign * h;
                    Eigen::LLT<Matrix> llt(moved);
                    if (llt.info() == Eigen::Success) {
                        const double slope = (objective(moved, s.matrix(), pen) - g0) / h;
                        worst = std::min(worst, slope);
                        break;
                    }
                    if (attempt >= 40) throw_domain("check_stationarity: point is on the PD boundary");
                    h *= 0.5;
                }
            }
        }
    }
    return worst;
}

int run_verification_suite(const SuiteReporter& report)
{
    int failures = 0;
    auto emit = [&](const std::string& name, bool ok, const std::string& detail) {
        if (!ok) ++failures;
        if (report) report(name, ok, detail);
    };

    {
        std::mt19937_64 rng(20120517);
        std::uniform_real_distribution<double> ua(1e-6, 10.0);
        std::uniform_real_distribution<double> ur(0.0, 5.0);
        double worst = 0.0;
        for (int k = 0; k < 1000; ++k) {
            const double a = ua(rng);
            const double rho = ur(rng);
            worst = std::max(worst, std::abs(gamma_update(a, rho) - oracle_gamma(a, rho)));
        }
        std::ostringstream msg;
        msg << "max |closed form - golden section| = " << worst;
        emit("gamma closed form vs golden section (1000 pairs)", worst <= 1e-8, msg.str());
    }

    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    double worst_gap = -std::numeric_limits<double>::infinity();
    double worst_ecm_gap = -std::numeric_limits<double>::infinity();
    double worst_stat = std::numeric_limits<double>::infinity();
    SolverConfig cfg;
    cfg.outer_tol = 1e-10;
    cfg.max_outer_iters = 5000;
    for (int k = 0; k < 10; ++k) {
        Matrix y(6, 2);
        for (Index r = 0; r < y.rows(); ++r) {
            y(r, 0) = normal(rng);
            y(r, 1) = 0.6 * y(r, 0) + normal(rng);
        }
        const CovarianceMatrix s = sample_covariance(y);
        for (double rho : {0.05, 0.2, 1.0}) {
            const SolverResult cd = solve_cd(s, rho, cfg);
            const SolverResult ecm = solve_ecm(s, rho, cfg);
            const OracleReport grid = oracle_small_problem(s, rho);
            worst_gap = std::max(worst_gap, cd.objective_trace.back() - grid.best_value);
            worst_ecm_gap = std::max(worst_ecm_gap, ecm.objective_trace.back() - grid.best_value);
            worst_stat = std::min(worst_stat, check_stationarity(cd.sigma_hat, s, rho, 1e-6));
        }
    }
    {
        std::ostringstream msg;
        msg << "max g_CD - g_grid = " << worst_gap;
        emit("CD vs grid oracle, p = 2 (30 cases)", worst_gap <= 1e-3, msg.str());
    }
    {
        std::ostringstream msg;
        msg << "max g_ECM - g_grid = " << worst_ecm_gap;
        emit("ECM vs grid oracle, p = 2 (30 cases)", worst_ecm_gap <= 1e-2, msg.str());
    }
    {
        std::ostringstream msg;
        msg << "most negative directional derivative = " << worst_stat;
        emit("CD stationarity, step 1e-6", worst_stat >= -1e-4, msg.str());
    }
    return failures;
}

} // namespace covglasso::oracle
