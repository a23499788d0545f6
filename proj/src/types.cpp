#include <covglasso/types.hpp>

#include <Eigen/Cholesky>
#include <cmath>
#include <string>

namespace covglasso {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
        case ErrorKind::invalid_input: return "invalid input";
        case ErrorKind::domain: return "domain error";
        case ErrorKind::degenerate_subproblem: return "degenerate subproblem";
        case ErrorKind::numerical: return "numerical error";
        case ErrorKind::io: return "I/O error";
    }
    return "unknown error";
}

CovarianceMatrix::CovarianceMatrix(const Matrix& m, double tol)
{
    if (m.rows() == 0 || m.rows() != m.cols()) {
        throw_invalid("covariance matrix must be square and non-empty, got "
                      + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    if (!m.allFinite()) throw_invalid("covariance matrix has non-finite entries");
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > tol) {
        throw_invalid("matrix is not symmetric (max asymmetry " + std::to_string(asym) + ")");
    }
    m_ = 0.5 * (m + m.transpose());
}

CovarianceMatrix CovarianceMatrix::identity(Index p)
{
    return CovarianceMatrix(Matrix::Identity(p, p));
}

bool CovarianceMatrix::is_positive_definite() const
{
    Eigen::LLT<Matrix> llt(m_);
    return llt.info() == Eigen::Success;
}

PenaltySpec::PenaltySpec(double rho) : rho_(rho)
{
    if (!(rho >= 0.0) || !std::isfinite(rho)) {
        throw_invalid("penalty rho must be finite and >= 0, got " + std::to_string(rho));
    }
}

PenaltySpec::PenaltySpec(const Matrix& weights)
{
    if (weights.rows() == 0 || weights.rows() != weights.cols()) {
        throw_invalid("penalty matrix must be square and non-empty");
    }
    if (!weights.allFinite() || (weights.array() < 0.0).any()) {
        throw_invalid("penalty matrix entries must be finite and >= 0");
    }
    if ((weights - weights.transpose()).cwiseAbs().maxCoeff() != 0.0) {
        throw_invalid("penalty matrix must be symmetric");
    }
    weights_ = weights;
}

double PenaltySpec::scalar() const
{
    if (weights_) throw_invalid("penalty is element-wise, not scalar");
    return rho_;
}

double PenaltySpec::at(Index i, Index j) const
{
    return weights_ ? (*weights_)(i, j) : rho_;
}

Matrix PenaltySpec::expand(Index p) const
{
    check_dim(p);
    if (weights_) return *weights_;
    return Matrix::Constant(p, p, rho_);
}

void PenaltySpec::check_dim(Index p) const
{
    if (weights_ && weights_->rows() != p) {
        throw_invalid("penalty matrix is " + std::to_string(weights_->rows())
                      + "x" + std::to_string(weights_->rows()) + " but problem has p = "
                      + std::to_string(p));
    }
}

void SolverConfig::validate() const
{
    if (!(outer_tol > 0.0)) throw_invalid("outer_tol must be > 0");
    if (!(inner_tol > 0.0)) throw_invalid("inner_tol must be > 0");
    if (!(ecm_scale_floor > 0.0)) throw_invalid("ecm_scale_floor must be > 0");
    if (!(zero_report_threshold > 0.0)) throw_invalid("zero_report_threshold must be > 0");
    if (max_outer_iters < 1) throw_invalid("max_outer_iters must be >= 1");
    if (max_inner_iters < 1) throw_invalid("max_inner_iters must be >= 1");
    if (init.kind == InitKind::diagonal_of_s_plus_eps && !(init.eps > 0.0)) {
        throw_invalid("diagonal-plus-eps initialization needs eps > 0");
    }
    if (init.kind == InitKind::custom && !init.custom) {
        throw_invalid("custom initialization requires a matrix");
    }
}

double nonzero_fraction(const Matrix& m, double threshold)
{
    const Index p = m.rows();
    if (p < 2) return 0.0;
    long count = 0;
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < p; ++i) {
            if (i != j && std::abs(m(i, j)) > threshold) ++count;
        }
    }
    return static_cast<double>(count) / static_cast<double>(p * (p - 1));
}

} // namespace covglasso
