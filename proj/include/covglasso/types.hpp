#pragma once

#include <covglasso/errors.hpp>

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace covglasso {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/**
 * Dense symmetric p x p matrix. Used both for the optimization variable and
 * for the sample covariance.
 *
 * Construction checks symmetry up to `tol` (max absolute asymmetry) and then
 * stores the exactly symmetric average, so entries(i,j) == entries(j,i) holds
 * bit-for-bit afterwards. Positive definiteness is not asserted here; use
 * `is_positive_definite()` where the caller needs it.
 */
class CovarianceMatrix
{
public:
    explicit CovarianceMatrix(const Matrix& m, double tol = 0.0);

    static CovarianceMatrix identity(Index p);

    Index dim() const noexcept { return m_.rows(); }
    const Matrix& matrix() const noexcept { return m_; }
    double operator()(Index i, Index j) const { return m_(i, j); }

    bool is_positive_definite() const;

private:
    Matrix m_;
};

/// Scalar rho >= 0, or a symmetric element-wise matrix of nonnegative penalties.
class PenaltySpec
{
public:
    PenaltySpec(double rho); // NOLINT(google-explicit-constructor)
    explicit PenaltySpec(const Matrix& weights);

    bool is_scalar() const noexcept { return !weights_.has_value(); }
    double scalar() const;
    double at(Index i, Index j) const;

    /// Penalty as a full p x p matrix. A scalar expands to a constant matrix.
    Matrix expand(Index p) const;

    /// Throws invalid_input when the penalty cannot apply to a p x p problem.
    void check_dim(Index p) const;

private:
    double rho_ = 0.0;
    std::optional<Matrix> weights_;
};

enum class InitKind {
    sample_covariance,
    diagonal_of_s,
    diagonal_of_s_plus_eps,
    custom,
};

struct InitStrategy
{
    InitKind kind = InitKind::sample_covariance;
    double eps = 1e-3;
    std::optional<Matrix> custom;

    static InitStrategy full() { return {}; }
    static InitStrategy diagonal() { return {InitKind::diagonal_of_s, 1e-3, std::nullopt}; }
    static InitStrategy diagonal_plus(double eps) { return {InitKind::diagonal_of_s_plus_eps, eps, std::nullopt}; }
    static InitStrategy from(Matrix m) { return {InitKind::custom, 1e-3, std::move(m)}; }
};

struct SolverConfig
{
    double outer_tol = 1e-3;        // absolute change in the objective between outer iterations
    double inner_tol = 1e-6;        // max absolute coefficient change over one lasso sweep
    int max_outer_iters = 500;
    int max_inner_iters = 10000;
    InitStrategy init;
    double ecm_scale_floor = 1e-12;
    double zero_report_threshold = 1e-4;
    std::uint64_t seed = 0;
    // ECM only: rewrite a diagonal_of_s start as diag(S) + 1e-3.
    bool ecm_promote_diagonal_init = true;

    void validate() const;
};

struct SolverResult
{
    CovarianceMatrix sigma_hat = CovarianceMatrix::identity(1);
    // objective_trace[0] is the objective at the starting point, then one
    // entry per completed outer iteration.
    std::vector<double> objective_trace;
    bool converged = false;
    int outer_iters = 0;
    double wall_time = 0.0;
    double nonzero_fraction = 0.0;
    long inner_nonconverged = 0; // CD only: lasso solves that hit max_inner_iters
};

/// Called after every outer iteration with the 1-based iteration and the iterate.
using IterationObserver = std::function<void(int, const Matrix&)>;

/**
 * Fraction of off-diagonal entries whose magnitude exceeds `threshold`.
 * threshold = 0 counts exact nonzeros. Returns 0 for p = 1.
 */
double nonzero_fraction(const Matrix& m, double threshold);

} // namespace covglasso
