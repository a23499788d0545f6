#include <covglasso/synthetic.hpp>

#include <covglasso/core.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace covglasso {

const char* to_string(ModelKind kind)
{
    switch (kind) {
        case ModelKind::sparse_tridiagonal: return "sparse";
        case ModelKind::dense_compound: return "dense";
    }
    return "unknown";
}

ModelKind parse_model_kind(const std::string& name)
{
    if (name == "sparse" || name == "sparse_tridiagonal") return ModelKind::sparse_tridiagonal;
    if (name == "dense" || name == "dense_compound") return ModelKind::dense_compound;
    throw_invalid("unknown model kind '" + name + "' (expected sparse or dense)");
}

void ModelSpec::validate() const
{
    if (p < 2) throw_invalid("model needs p >= 2, got " + std::to_string(p));
    if (n < 1) throw_invalid("model needs n >= 1, got " + std::to_string(n));
}

double sparse_model_delta(int p)
{
    if (p < 2) throw_invalid("sparse model needs p >= 2");
    const double c = std::cos(std::numbers::pi / (p + 1));
    return 0.8 * c * (p + 1) / (p - 1);
}

CovarianceMatrix make_sparse_sigma(int p)
{
    const double delta = sparse_model_delta(p);
    Matrix m = Matrix::Zero(p, p);
    for (int i = 0; i < p; ++i) {
        m(i, i) = delta;
        if (i + 1 < p) {
            m(i, i + 1) = 0.4;
            m(i + 1, i) = 0.4;
        }
    }
    return CovarianceMatrix(m);
}

CovarianceMatrix make_dense_sigma(int p)
{
    if (p < 2) throw_invalid("dense model needs p >= 2");
    Matrix m = Matrix::Ones(p, p);
    m.diagonal().setConstant(2.0);
    return CovarianceMatrix(m);
}

CovarianceMatrix make_sigma(ModelKind kind, int p)
{
    return kind == ModelKind::sparse_tridiagonal ? make_sparse_sigma(p) : make_dense_sigma(p);
}

Matrix sample_mvn(const CovarianceMatrix& sigma, int n, std::uint64_t seed)
{
    if (n < 1) throw_invalid("sample_mvn: n must be >= 1");
    Eigen::LLT<Matrix> llt(sigma.matrix());
    if (llt.info() != Eigen::Success) throw_domain("sample_mvn: Sigma is not positive definite");
    const Index p = sigma.dim();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix z(n, p);
    // fill row by row so a prefix of rows does not depend on n
    for (Index r = 0; r < n; ++r) {
        for (Index c = 0; c < p; ++c) z(r, c) = normal(rng);
    }
    return z * llt.matrixL().transpose();
}

double condition_number(const CovarianceMatrix& sigma)
{
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma.matrix(), Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw_numerical("condition_number: eigensolver failed");
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (lo <= 0.0) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

Dataset generate_dataset(const ModelSpec& spec)
{
    spec.validate();
    Dataset data{spec, make_sigma(spec.kind, spec.p), Matrix(), CovarianceMatrix::identity(1)};
    data.y = sample_mvn(data.sigma_true, spec.n, spec.seed);
    data.s = sample_covariance(data.y);
    return data;
}

} // namespace covglasso
