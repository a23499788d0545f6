#pragma once

#include "oracles/reference.hpp"

#include <covglasso/types.hpp>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <random>

namespace testing {

inline covglasso::Matrix random_spd(covglasso::Index p, std::uint64_t seed, double ridge = 0.1)
{
    std::mt19937_64 rng(seed);
    covglasso::Matrix m;
    ref::to(ref::random_spd(static_cast<std::size_t>(p), rng, ridge), m);
    return m;
}

inline covglasso::Matrix random_matrix(covglasso::Index rows, covglasso::Index cols, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    covglasso::Matrix m(rows, cols);
    for (covglasso::Index i = 0; i < rows; ++i)
        for (covglasso::Index j = 0; j < cols; ++j) m(i, j) = z(rng);
    return m;
}

// Sample covariance of n standard normal rows: PD when n > p.
inline covglasso::CovarianceMatrix random_sample_covariance(covglasso::Index p, covglasso::Index n, std::uint64_t seed)
{
    const covglasso::Matrix y = random_matrix(n, p, seed);
    covglasso::Matrix s = y.transpose() * y / static_cast<double>(n);
    return covglasso::CovarianceMatrix(0.5 * (s + s.transpose()));
}

inline bool cholesky_ok(const covglasso::Matrix& m)
{
    return m.llt().info() == Eigen::Success;
}

} // namespace testing
