#include <covglasso/core.hpp>

#include <Eigen/Cholesky>
#include <cmath>
#include <string>

namespace covglasso {

CovarianceMatrix sample_covariance(const Matrix& y, bool center)
{
    if (y.rows() < 1 || y.cols() < 1) throw_invalid("data matrix is empty");
    if (!y.allFinite()) throw_invalid("data matrix has non-finite entries");
    const double n = static_cast<double>(y.rows());
    Matrix s(y.cols(), y.cols());
    if (center) {
        const Matrix yc = y.rowwise() - y.colwise().mean();
        s.noalias() = yc.transpose() * yc;
    } else {
        s.noalias() = y.transpose() * y;
    }
    s /= n;
    return CovarianceMatrix(s, 1e-12 * (1.0 + s.cwiseAbs().maxCoeff()));
}

double log_det(const Matrix& m)
{
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) throw_domain("matrix is not positive definite");
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double objective(const Matrix& sigma, const Matrix& s, const Matrix& penalty)
{
    const Index p = sigma.rows();
    if (s.rows() != p || s.cols() != p || sigma.cols() != p) {
        throw_invalid("objective: dimension mismatch between Sigma and S");
    }
    if (penalty.rows() != p || penalty.cols() != p) {
        throw_invalid("objective: penalty dimension mismatch");
    }
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success) throw_domain("objective: Sigma is not positive definite");
    const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    // tr(S Sigma^-1) = sum of the diagonal of Sigma^-1 S
    const double trace = llt.solve(s).trace();
    const double l1 = (penalty.array() * sigma.array().abs()).sum();
    return logdet + trace + l1;
}

double objective(const CovarianceMatrix& sigma, const CovarianceMatrix& s,
                 const PenaltySpec& penalty)
{
    return objective(sigma.matrix(), s.matrix(), penalty.expand(sigma.dim()));
}

std::vector<Index> complement_indices(Index p, Index pivot)
{
    std::vector<Index> idx;
    idx.reserve(static_cast<std::size_t>(p > 0 ? p - 1 : 0));
    for (Index k = 0; k < p; ++k) {
        if (k != pivot) idx.push_back(k);
    }
    return idx;
}

BlockPartition partition(const Matrix& m, Index pivot)
{
    const Index p = m.rows();
    if (m.cols() != p) throw_invalid("partition: matrix must be square");
    if (p < 2) throw_invalid("partition: need p >= 2, got p = " + std::to_string(p));
    if (pivot < 0 || pivot >= p) {
        throw_invalid("partition: column " + std::to_string(pivot) + " out of range");
    }
    const auto idx = complement_indices(p, pivot);
    BlockPartition part;
    part.m11 = m(idx, idx);
    part.m12 = m(idx, pivot);
    part.m22 = m(pivot, pivot);
    part.pivot = pivot;
    return part;
}

ColumnPartition partition_column(const CovarianceMatrix& sigma,
                                 const CovarianceMatrix& s, Index pivot)
{
    if (sigma.dim() != s.dim()) throw_invalid("partition_column: dimension mismatch");
    return {partition(sigma.matrix(), pivot), partition(s.matrix(), pivot)};
}

Matrix reassemble(const BlockPartition& part)
{
    const Index p = part.m11.rows() + 1;
    if (part.m12.size() != p - 1 || part.pivot < 0 || part.pivot >= p) {
        throw_invalid("reassemble: inconsistent partition");
    }
    const auto idx = complement_indices(p, part.pivot);
    Matrix m(p, p);
    m(idx, idx) = part.m11;
    m(idx, part.pivot) = part.m12;
    m(part.pivot, idx) = part.m12.transpose();
    m(part.pivot, part.pivot) = part.m22;
    return m;
}

double schur_gamma(const BlockPartition& part)
{
    Eigen::LLT<Matrix> llt(part.m11);
    if (llt.info() != Eigen::Success) throw_domain("schur_gamma: Sigma11 is not positive definite");
    return part.m22 - part.m12.dot(llt.solve(part.m12));
}

ReparamPoint to_reparam(const BlockPartition& part)
{
    return {part.m12, schur_gamma(part)};
}

BlockPartition from_reparam(const Matrix& sigma11, const ReparamPoint& point, Index pivot)
{
    Eigen::LLT<Matrix> llt(sigma11);
    if (llt.info() != Eigen::Success) throw_domain("from_reparam: Sigma11 is not positive definite");
    BlockPartition part;
    part.m11 = sigma11;
    part.m12 = point.b;
    part.m22 = point.gamma + point.b.dot(llt.solve(point.b));
    part.pivot = pivot;
    return part;
}

Matrix inverse_from_blocks(const Matrix& sigma11, const ReparamPoint& point)
{
    if (!(point.gamma > 0.0)) throw_domain("inverse_from_blocks: gamma must be > 0");
    Eigen::LLT<Matrix> llt(sigma11);
    if (llt.info() != Eigen::Success) {
        throw_domain("inverse_from_blocks: Sigma11 is not positive definite");
    }
    const Index m = sigma11.rows();
    const Matrix x = llt.solve(Matrix::Identity(m, m));
    const Vector xb = x * point.b;
    Matrix inv(m + 1, m + 1);
    inv.topLeftCorner(m, m) = x + xb * xb.transpose() / point.gamma;
    inv.topRightCorner(m, 1) = -xb / point.gamma;
    inv.bottomLeftCorner(1, m) = -xb.transpose() / point.gamma;
    inv(m, m) = 1.0 / point.gamma;
    return inv;
}

} // namespace covglasso
