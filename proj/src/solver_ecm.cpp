#include <covglasso/solver_ecm.hpp>

#include "solver_loop.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>
#include <string>

namespace covglasso {

namespace {

Matrix weights_from(const Matrix& sigma, const Matrix& penalty, double floor)
{
    const Index p = sigma.rows();
    Matrix w(p, p);
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < p; ++i) {
            w(i, j) = (i == j) ? 0.0 : penalty(i, j) / std::max(std::abs(sigma(i, j)), floor);
        }
    }
    return w;
}

Vector solve_ridge(const LassoSubproblem& sub, const Vector& wcol)
{
    Matrix m = sub.v;
    m.diagonal() += wcol;
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) {
        Eigen::LDLT<Matrix> ldlt(m);
        std::ostringstream msg;
        msg << "beta_ecm: V + rho D^-1 is not positive definite (reciprocal condition estimate "
            << ldlt.rcond() << ")";
        throw_numerical(msg.str());
    }
    Vector beta = llt.solve(sub.u);
    if (!beta.allFinite()) {
        std::ostringstream msg;
        msg << "beta_ecm: solve produced non-finite values (reciprocal condition estimate "
            << llt.rcond() << ")";
        throw_numerical(msg.str());
    }
    return beta;
}

void ecm_update_column(Matrix& sigma, const Matrix& s, Index i, const Matrix& penalty,
                       const Matrix& weights)
{
    const auto idx = complement_indices(sigma.rows(), i);
    const ColumnSystem sys = ColumnSystem::build(sigma, s, i);
    const Vector b = sigma(idx, i);

    const double gamma = detail::gamma_for_column(sys.residual(b), penalty(i, i), i);
    const LassoSubproblem sub = build_lasso_subproblem(sys, gamma, penalty(i, i), penalty(idx, i));
    const Vector beta = solve_ridge(sub, weights(idx, i));

    sigma(idx, i) = beta;
    sigma(i, idx) = beta.transpose();
    sigma(i, i) = gamma + beta.dot(sys.sigma11_inv * beta);
}

void check_nonzero_start(const Matrix& sigma0, const Matrix& penalty)
{
    const Index p = sigma0.rows();
    for (Index j = 0; j < p; ++j) {
        for (Index i = j + 1; i < p; ++i) {
            if (penalty(i, j) > 0.0 && sigma0(i, j) == 0.0) {
                throw_invalid("ECM must be initialized with every penalized off-diagonal entry "
                              "nonzero; sigma(" + std::to_string(i) + "," + std::to_string(j)
                              + ") = 0 would keep it fixed at zero (use diag(S) + eps)");
            }
        }
    }
}

} // namespace

EStepWeights e_step_weights(const CovarianceMatrix& sigma_k, const PenaltySpec& penalty, double floor)
{
    if (!(floor > 0.0)) throw_invalid("e_step_weights: floor must be > 0");
    return {weights_from(sigma_k.matrix(), penalty.expand(sigma_k.dim()), floor)};
}

Vector beta_ecm(const LassoSubproblem& sub, const Vector& d, double floor)
{
    const Index m = sub.u.size();
    if (d.size() != m || sub.lambda.size() != m || sub.v.rows() != m) {
        throw_invalid("beta_ecm: inconsistent dimensions");
    }
    if (!(floor > 0.0)) throw_invalid("beta_ecm: floor must be > 0");
    Vector wcol(m);
    for (Index j = 0; j < m; ++j) wcol(j) = sub.lambda(j) / std::max(std::abs(d(j)), floor);
    return solve_ridge(sub, wcol);
}

CovarianceMatrix ecm_column_update(const CovarianceMatrix& sigma, const CovarianceMatrix& s,
                                   Index i, const PenaltySpec& penalty,
                                   const EStepWeights& weights, const SolverConfig& cfg)
{
    const Index p = sigma.dim();
    if (s.dim() != p || weights.w.rows() != p) throw_invalid("ecm_column_update: dimension mismatch");
    if (p < 2) throw_invalid("ecm_column_update: need p >= 2");
    if (i < 0 || i >= p) throw_invalid("ecm_column_update: column out of range");
    cfg.validate();
    Matrix next = sigma.matrix();
    ecm_update_column(next, s.matrix(), i, penalty.expand(p), weights.w);
    return CovarianceMatrix(next);
}

SolverResult solve_ecm(const CovarianceMatrix& s, const PenaltySpec& penalty,
                       const SolverConfig& cfg, const IterationObserver& observer)
{
    cfg.validate();
    const Index p = s.dim();
    const Matrix pen = penalty.expand(p);
    const Matrix& smat = s.matrix();

    if (p >= 2 && pen.diagonal().minCoeff() == 0.0 && !s.is_positive_definite()) {
        throw_invalid("solve_ecm: a zero diagonal penalty requires a positive definite S");
    }

    Matrix sigma0 = detail::initial_point(smat, cfg, detail::SolverKind::ecm);
    check_nonzero_start(sigma0, pen);

    detail::Sweep sweep = [&](Matrix& sigma) {
        if (p == 1) {
            sigma = detail::solve_scalar(smat, pen);
            return;
        }
        const Matrix weights = weights_from(sigma, pen, cfg.ecm_scale_floor);
        for (Index i = 0; i < p; ++i) ecm_update_column(sigma, smat, i, pen, weights);
    };
    return detail::run_outer_loop(smat, pen, std::move(sigma0), cfg, sweep, observer,
                                  cfg.zero_report_threshold);
}

} // namespace covglasso
