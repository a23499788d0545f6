#pragma once

#include <covglasso/solver_cd.hpp>
#include <covglasso/types.hpp>

namespace covglasso {

/// w(i,j) = P_ij / max(|sigma_ij|, floor) off the diagonal, 0 on it.
struct EStepWeights
{
    Matrix w;
};

EStepWeights e_step_weights(const CovarianceMatrix& sigma_k, const PenaltySpec& penalty, double floor);

/**
 * Conditional maximizer b = (V + diag(lambda_j / max(d_j, floor)))^-1 u,
 * solved directly by Cholesky. `d` holds |sigma12| from the E-step point.
 */
Vector beta_ecm(const LassoSubproblem& sub, const Vector& d, double floor);

/// One pair of CM steps (gamma, then b) for column `i` under fixed weights.
CovarianceMatrix ecm_column_update(const CovarianceMatrix& sigma, const CovarianceMatrix& s,
                                   Index i, const PenaltySpec& penalty,
                                   const EStepWeights& weights, const SolverConfig& cfg);

/**
 * ECM iterations: the E-step weights are taken from the iterate at the start
 * of each outer iteration, followed by 2p CM steps.
 *
 * Every off-diagonal entry with a positive penalty must start nonzero. A
 * `diagonal_of_s` start is rewritten as diag(S) + 1e-3 unless
 * cfg.ecm_promote_diagonal_init is false; any remaining exact zero is
 * rejected with invalid_input.
 *
 * Off-diagonals never reach exact zero; nonzero_fraction counts entries
 * above cfg.zero_report_threshold.
 */
SolverResult solve_ecm(const CovarianceMatrix& s, const PenaltySpec& penalty,
                       const SolverConfig& cfg = {}, const IterationObserver& observer = {});

} // namespace covglasso
