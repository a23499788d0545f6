#pragma once

#include <covglasso/types.hpp>

namespace covglasso {

/**
 * S = Y'Y / n for an n x p data matrix. No mean-centering unless `center`
 * is set, in which case column means are removed first.
 */
CovarianceMatrix sample_covariance(const Matrix& y, bool center = false);

/// log det via Cholesky. Throws domain error if `m` is not positive definite.
double log_det(const Matrix& m);

/**
 * g(Sigma) = log det Sigma + tr(S Sigma^-1) + sum_ij P_ij |sigma_ij|.
 *
 * The penalty sums over all ordered pairs, so each off-diagonal magnitude
 * counts twice and the diagonal counts once.
 */
double objective(const CovarianceMatrix& sigma, const CovarianceMatrix& s,
                 const PenaltySpec& penalty);

/// Same as `objective` with the penalty already expanded to p x p.
double objective(const Matrix& sigma, const Matrix& s, const Matrix& penalty);

/// sign(x) * max(|x| - t, 0)
inline double soft_threshold(double x, double t)
{
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
}

/**
 * One matrix split around a pivot column, with the pivot moved last:
 *
 *     [ m11   m12 ]
 *     [ m12'  m22 ]
 *
 * m11 keeps the remaining rows/columns in their original order.
 */
struct BlockPartition
{
    Matrix m11;
    Vector m12;
    double m22 = 0.0;
    Index pivot = 0;
};

/// Blocks of Sigma and S for one column visit.
struct ColumnPartition
{
    BlockPartition sigma;
    BlockPartition s;
};

/// Throws invalid_input for p < 2 or an out-of-range column (0-based).
BlockPartition partition(const Matrix& m, Index pivot);
ColumnPartition partition_column(const CovarianceMatrix& sigma,
                                 const CovarianceMatrix& s, Index pivot);

/// Inverse of `partition`: undoes the pivot permutation.
Matrix reassemble(const BlockPartition& part);

/// Copy of the pivot-free index set {0..p-1} \ {pivot}, in order.
std::vector<Index> complement_indices(Index p, Index pivot);

/// b = sigma12 and gamma = sigma22 - b' Sigma11^-1 b.
struct ReparamPoint
{
    Vector b;
    double gamma = 0.0;
};

/**
 * Schur complement sigma22 - sigma12' Sigma11^-1 sigma12. Positive iff the
 * full matrix is positive definite (given Sigma11 is). Throws domain error
 * when Sigma11 is not positive definite.
 */
double schur_gamma(const BlockPartition& part);

ReparamPoint to_reparam(const BlockPartition& part);

/// Back from (b, gamma) to a partition: sigma22 = gamma + b' Sigma11^-1 b.
BlockPartition from_reparam(const Matrix& sigma11, const ReparamPoint& point, Index pivot);

/**
 * Inverse of the partitioned matrix, in the permuted (pivot-last) order,
 * assembled blockwise from (Sigma11, b, gamma):
 *
 *     [ X + X b b' X / gamma   -X b / gamma ]
 *     [ -b' X / gamma           1 / gamma   ]     with X = Sigma11^-1
 */
Matrix inverse_from_blocks(const Matrix& sigma11, const ReparamPoint& point);

} // namespace covglasso
