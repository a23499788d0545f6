#pragma once

#include <covglasso/core.hpp>
#include <covglasso/types.hpp>

namespace covglasso {

/**
 * Products shared by every quantity of one column visit:
 *
 *   sigma11_inv = Sigma11^-1
 *   quad        = Sigma11^-1 S11 Sigma11^-1
 *   cross       = Sigma11^-1 s12
 *
 * Sigma11^-1 is recomputed from a fresh Cholesky factor each time.
 */
struct ColumnSystem
{
    Matrix sigma11_inv;
    Matrix quad;
    Vector cross;
    double s22 = 0.0;

    static ColumnSystem build(const ColumnPartition& part);
    static ColumnSystem build(const Matrix& sigma, const Matrix& s, Index pivot);

    /// a = b' quad b - 2 cross' b + s22
    double residual(const Vector& b) const;
};

/// a for the column given by `part` evaluated at b.
double compute_a(const Vector& b, const ColumnPartition& part);

/**
 * Minimizer over gamma > 0 of log(gamma) + a / gamma + rho * gamma.
 * Throws degenerate_subproblem when a <= 0 (the minimizer would be 0).
 */
double gamma_update(double a, double rho);

/// min_b  b'Vb - 2u'b + 2 sum_j lambda_j |b_j|
struct LassoSubproblem
{
    Matrix v;
    Vector u;
    Vector lambda;
};

LassoSubproblem build_lasso_subproblem(const ColumnPartition& part, double gamma, double rho);

/// Element-wise form: `diag_rho` multiplies Sigma11^-1 in V, `offdiag_rho`
/// holds the per-coordinate lasso weights.
LassoSubproblem build_lasso_subproblem(const ColumnSystem& sys, double gamma,
                                       double diag_rho, const Vector& offdiag_rho);

struct LassoSolution
{
    Vector beta;
    bool converged = false;
    int sweeps = 0;
};

/**
 * Cyclic coordinate descent with soft-thresholding, warm-started at `beta0`.
 * Stops when a full sweep changes no coordinate by more than
 * cfg.inner_tol; after cfg.max_inner_iters sweeps the last iterate is
 * returned with converged = false.
 */
LassoSolution lasso_inner(const LassoSubproblem& sub, const Vector& beta0, const SolverConfig& cfg);

/// One block update (gamma step then lasso step) of column `i` (0-based).
CovarianceMatrix cd_column_update(const CovarianceMatrix& sigma, const CovarianceMatrix& s,
                                  Index i, const PenaltySpec& penalty, const SolverConfig& cfg);

/**
 * Block coordinate descent over columns 0..p-1 per outer iteration until
 * the objective changes by less than cfg.outer_tol.
 *
 * Rejects problems where some diagonal penalty is zero and S is not
 * positive definite, since the lasso subproblem may then have no unique
 * minimizer.
 */
SolverResult solve_cd(const CovarianceMatrix& s, const PenaltySpec& penalty,
                      const SolverConfig& cfg = {}, const IterationObserver& observer = {});

namespace detail {

struct CdStats
{
    long inner_nonconverged = 0;
};

void cd_update_column(Matrix& sigma, const Matrix& s, Index i, const Matrix& penalty,
                      const SolverConfig& cfg, CdStats& stats);

double gamma_for_column(double a, double rho, Index column);

} // namespace detail

} // namespace covglasso
