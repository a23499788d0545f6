#pragma once

#include <covglasso/types.hpp>

#include <cstdint>
#include <string>

namespace covglasso {

enum class ModelKind {
    sparse_tridiagonal, // 0.4 on the first off-diagonals, delta on the diagonal
    dense_compound,     // 2 on the diagonal, 1 elsewhere
};

const char* to_string(ModelKind kind);
/// Accepts "sparse" / "dense" (and the full enum names). Throws invalid_input.
ModelKind parse_model_kind(const std::string& name);

struct ModelSpec
{
    ModelKind kind = ModelKind::sparse_tridiagonal;
    int p = 2;
    int n = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

/**
 * Diagonal of the sparse model: 0.8 cos(pi/(p+1)) (p+1)/(p-1). The tridiagonal
 * Toeplitz eigenvalues are delta + 0.8 cos(k pi/(p+1)), so this puts the
 * condition number at exactly p.
 */
double sparse_model_delta(int p);

CovarianceMatrix make_sparse_sigma(int p);
CovarianceMatrix make_dense_sigma(int p);
CovarianceMatrix make_sigma(ModelKind kind, int p);

/// n rows drawn iid from N(0, sigma): Z L' with L the Cholesky factor.
/// Deterministic in `seed` (mt19937_64).
Matrix sample_mvn(const CovarianceMatrix& sigma, int n, std::uint64_t seed);

/// lambda_max / lambda_min, or +inf when lambda_min <= 0.
double condition_number(const CovarianceMatrix& sigma);

struct Dataset
{
    ModelSpec spec;
    CovarianceMatrix sigma_true = CovarianceMatrix::identity(1);
    Matrix y;
    CovarianceMatrix s = CovarianceMatrix::identity(1);
};

Dataset generate_dataset(const ModelSpec& spec);

} // namespace covglasso
