#include "solver_loop.hpp"

#include <covglasso/core.hpp>
#include <covglasso/solver_cd.hpp>

#include <Eigen/Cholesky>
#include <chrono>
#include <cmath>
#include <string>

namespace covglasso::detail {

Matrix initial_point(const Matrix& s, const SolverConfig& cfg, SolverKind kind)
{
    const Index p = s.rows();
    Matrix sigma;
    InitKind init = cfg.init.kind;
    double eps = cfg.init.eps;
    if (kind == SolverKind::ecm && init == InitKind::diagonal_of_s && cfg.ecm_promote_diagonal_init) {
        init = InitKind::diagonal_of_s_plus_eps;
        eps = 1e-3;
    }
    switch (init) {
        case InitKind::sample_covariance:
            sigma = s;
            break;
        case InitKind::diagonal_of_s:
            sigma = s.diagonal().asDiagonal();
            break;
        case InitKind::diagonal_of_s_plus_eps:
            sigma = Matrix(s.diagonal().asDiagonal()) + Matrix::Constant(p, p, eps);
            break;
        case InitKind::custom: {
            const Matrix& m = *cfg.init.custom;
            if (m.rows() != p || m.cols() != p) {
                throw_invalid("custom initialization is " + std::to_string(m.rows()) + "x"
                              + std::to_string(m.cols()) + ", expected "
                              + std::to_string(p) + "x" + std::to_string(p));
            }
            sigma = CovarianceMatrix(m, 1e-8).matrix();
            break;
        }
    }
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success) {
        throw_invalid("initial Sigma is not positive definite");
    }
    return sigma;
}

Matrix solve_scalar(const Matrix& s, const Matrix& penalty)
{
    Matrix sigma(1, 1);
    sigma(0, 0) = gamma_for_column(s(0, 0), penalty(0, 0), 0);
    return sigma;
}

SolverResult run_outer_loop(const Matrix& s, const Matrix& penalty, Matrix sigma,
                            const SolverConfig& cfg, const Sweep& sweep,
                            const IterationObserver& observer, double zero_threshold)
{
    const auto start = std::chrono::steady_clock::now();
    SolverResult result;
    double g_prev = objective(sigma, s, penalty);
    result.objective_trace.push_back(g_prev);

    for (int k = 1; k <= cfg.max_outer_iters; ++k) {
        sweep(sigma);
        const double g = objective(sigma, s, penalty);
        result.objective_trace.push_back(g);
        result.outer_iters = k;
        if (observer) observer(k, sigma);
        if (std::abs(g - g_prev) < cfg.outer_tol) {
            result.converged = true;
            break;
        }
        g_prev = g;
    }

    result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.nonzero_fraction = nonzero_fraction(sigma, zero_threshold);
    result.sigma_hat = CovarianceMatrix(sigma);
    return result;
}

} // namespace covglasso::detail
