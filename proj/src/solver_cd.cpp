#include <covglasso/solver_cd.hpp>

#include "solver_loop.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <string>

namespace covglasso {

namespace {

ColumnSystem build_system(const Matrix& sigma11, const Matrix& s11, const Vector& s12, double s22)
{
    Eigen::LLT<Matrix> llt(sigma11);
    if (llt.info() != Eigen::Success) throw_domain("Sigma11 is not positive definite");
    const Index m = sigma11.rows();
    ColumnSystem sys;
    sys.sigma11_inv = llt.solve(Matrix::Identity(m, m));
    sys.sigma11_inv = 0.5 * (sys.sigma11_inv + sys.sigma11_inv.transpose()).eval();
    const Matrix tmp = s11 * sys.sigma11_inv;
    sys.quad.noalias() = sys.sigma11_inv * tmp;
    sys.quad = 0.5 * (sys.quad + sys.quad.transpose()).eval();
    sys.cross.noalias() = sys.sigma11_inv * s12;
    sys.s22 = s22;
    return sys;
}

} // namespace

ColumnSystem ColumnSystem::build(const ColumnPartition& part)
{
    return build_system(part.sigma.m11, part.s.m11, part.s.m12, part.s.m22);
}

ColumnSystem ColumnSystem::build(const Matrix& sigma, const Matrix& s, Index pivot)
{
    const auto idx = complement_indices(sigma.rows(), pivot);
    return build_system(sigma(idx, idx), s(idx, idx), s(idx, pivot), s(pivot, pivot));
}

double ColumnSystem::residual(const Vector& b) const
{
    return b.dot(quad * b) - 2.0 * cross.dot(b) + s22;
}

double compute_a(const Vector& b, const ColumnPartition& part)
{
    if (b.size() != part.sigma.m12.size()) throw_invalid("compute_a: b has the wrong length");
    return ColumnSystem::build(part).residual(b);
}

double gamma_update(double a, double rho)
{
    if (!std::isfinite(a) || !std::isfinite(rho) || rho < 0.0) {
        throw_domain("gamma_update: need finite a and rho >= 0");
    }
    if (a <= 0.0) {
        throw Error(ErrorKind::degenerate_subproblem,
                    "gamma_update: a = " + std::to_string(a)
                        + " <= 0 gives gamma = 0 (singular S column); add jitter to S");
    }
    if (rho == 0.0) return a;
    // (-1 + sqrt(1 + 4 a rho)) / (2 rho), rationalized to avoid cancellation
    return 2.0 * a / (1.0 + std::sqrt(1.0 + 4.0 * a * rho));
}

LassoSubproblem build_lasso_subproblem(const ColumnSystem& sys, double gamma,
                                       double diag_rho, const Vector& offdiag_rho)
{
    if (!(gamma > 0.0)) throw_domain("build_lasso_subproblem: gamma must be > 0");
    if (offdiag_rho.size() != sys.cross.size()) {
        throw_invalid("build_lasso_subproblem: penalty vector has the wrong length");
    }
    LassoSubproblem sub;
    sub.v = sys.quad / gamma + diag_rho * sys.sigma11_inv;
    sub.u = sys.cross / gamma;
    sub.lambda = offdiag_rho;
    return sub;
}

LassoSubproblem build_lasso_subproblem(const ColumnPartition& part, double gamma, double rho)
{
    const auto sys = ColumnSystem::build(part);
    return build_lasso_subproblem(sys, gamma, rho, Vector::Constant(sys.cross.size(), rho));
}

LassoSolution lasso_inner(const LassoSubproblem& sub, const Vector& beta0, const SolverConfig& cfg)
{
    const Index m = sub.u.size();
    if (sub.v.rows() != m || sub.v.cols() != m || beta0.size() != m || sub.lambda.size() != m) {
        throw_invalid("lasso_inner: inconsistent dimensions");
    }
    for (Index j = 0; j < m; ++j) {
        if (!(sub.v(j, j) > 0.0)) throw_domain("lasso_inner: V has a nonpositive diagonal");
    }

    LassoSolution sol;
    sol.beta = beta0;
    Vector vb = sub.v * sol.beta;
    for (int sweep = 1; sweep <= cfg.max_inner_iters; ++sweep) {
        double max_change = 0.0;
        for (Index j = 0; j < m; ++j) {
            const double vjj = sub.v(j, j);
            const double old = sol.beta(j);
            const double partial = sub.u(j) - (vb(j) - vjj * old);
            const double next = soft_threshold(partial, sub.lambda(j)) / vjj;
            const double delta = next - old;
            if (delta != 0.0) {
                vb.noalias() += delta * sub.v.col(j);
                sol.beta(j) = next;
                max_change = std::max(max_change, std::abs(delta));
            }
        }
        sol.sweeps = sweep;
        if (max_change < cfg.inner_tol) {
            sol.converged = true;
            break;
        }
    }
    return sol;
}

namespace detail {

double gamma_for_column(double a, double rho, Index column)
{
    try {
        return gamma_update(a, rho);
    } catch (const Error& e) {
        throw Error(e.kind(), std::string(e.what()) + " (column " + std::to_string(column) + ")",
                    column);
    }
}

void cd_update_column(Matrix& sigma, const Matrix& s, Index i, const Matrix& penalty,
                      const SolverConfig& cfg, CdStats& stats)
{
    const auto idx = complement_indices(sigma.rows(), i);
    const ColumnSystem sys = ColumnSystem::build(sigma, s, i);
    const Vector b = sigma(idx, i);

    const double gamma = gamma_for_column(sys.residual(b), penalty(i, i), i);
    const LassoSubproblem sub = build_lasso_subproblem(sys, gamma, penalty(i, i), penalty(idx, i));
    const LassoSolution sol = lasso_inner(sub, b, cfg);
    if (!sol.converged) ++stats.inner_nonconverged;

    sigma(idx, i) = sol.beta;
    sigma(i, idx) = sol.beta.transpose();
    sigma(i, i) = gamma + sol.beta.dot(sys.sigma11_inv * sol.beta);
}

} // namespace detail

CovarianceMatrix cd_column_update(const CovarianceMatrix& sigma, const CovarianceMatrix& s,
                                  Index i, const PenaltySpec& penalty, const SolverConfig& cfg)
{
    const Index p = sigma.dim();
    if (s.dim() != p) throw_invalid("cd_column_update: dimension mismatch");
    if (p < 2) throw_invalid("cd_column_update: need p >= 2");
    if (i < 0 || i >= p) throw_invalid("cd_column_update: column out of range");
    cfg.validate();
    Matrix next = sigma.matrix();
    detail::CdStats stats;
    detail::cd_update_column(next, s.matrix(), i, penalty.expand(p), cfg, stats);
    return CovarianceMatrix(next);
}

SolverResult solve_cd(const CovarianceMatrix& s, const PenaltySpec& penalty,
                      const SolverConfig& cfg, const IterationObserver& observer)
{
    cfg.validate();
    const Index p = s.dim();
    const Matrix pen = penalty.expand(p);
    const Matrix& smat = s.matrix();

    if (p >= 2 && pen.diagonal().minCoeff() == 0.0 && !s.is_positive_definite()) {
        throw_invalid("solve_cd: a zero diagonal penalty requires a positive definite S");
    }

    Matrix sigma0 = detail::initial_point(smat, cfg, detail::SolverKind::cd);
    detail::CdStats stats;
    detail::Sweep sweep = [&](Matrix& sigma) {
        if (p == 1) {
            sigma = detail::solve_scalar(smat, pen);
            return;
        }
        for (Index i = 0; i < p; ++i) detail::cd_update_column(sigma, smat, i, pen, cfg, stats);
    };
    SolverResult result = detail::run_outer_loop(smat, pen, std::move(sigma0), cfg, sweep, observer, 0.0);
    result.inner_nonconverged = stats.inner_nonconverged;
    return result;
}

} // namespace covglasso
