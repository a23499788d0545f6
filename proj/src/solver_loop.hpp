#pragma once

#include <covglasso/types.hpp>

#include <functional>

namespace covglasso::detail {

enum class SolverKind { cd, ecm };

/// Sigma^(0) from the configured strategy. Throws invalid_input unless PD.
Matrix initial_point(const Matrix& s, const SolverConfig& cfg, SolverKind kind);

/// One outer iteration, updating sigma in place.
using Sweep = std::function<void(Matrix& sigma)>;

/**
 * Runs sweeps until |g_k - g_{k-1}| < outer_tol or max_outer_iters, recording
 * the objective trace. `zero_threshold` is used for nonzero_fraction.
 */
SolverResult run_outer_loop(const Matrix& s, const Matrix& penalty, Matrix sigma,
                            const SolverConfig& cfg, const Sweep& sweep,
                            const IterationObserver& observer, double zero_threshold);

/// Closed-form solution for p = 1: sigma = argmin log x + s/x + rho x.
Matrix solve_scalar(const Matrix& s, const Matrix& penalty);

} // namespace covglasso::detail
