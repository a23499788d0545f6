#pragma once

#include <covglasso/types.hpp>

#include <functional>
#include <string>

namespace covglasso {

/// Brute-force reference computations. Used for verification only.
namespace oracle {

/**
 * Golden-section search on [lo, hi] down to an interval narrower than `width`.
 *
 * `diff(x, y)` must return f(x) - f(y). Passing the difference instead of f
 * lets callers evaluate it without the cancellation that otherwise caps the
 * attainable resolution near a minimum at about sqrt(machine epsilon).
 */
double golden_section_minimize(const std::function<double(double, double)>& diff,
                               double lo, double hi, double width);

/**
 * Minimizer of log(g) + a/g + rho*g found by golden-section search on
 * [1e-8, a + 10/max(rho, 1e-8)]. If the minimum sits on the upper end the
 * bracket is widened tenfold, at most 3 times, before giving up.
 */
double oracle_gamma(double a, double rho);

struct OracleReport
{
    CovarianceMatrix best_point = CovarianceMatrix::identity(1);
    double best_value = 0.0;
    long evaluations = 0;
    double resolution = 0.0; // final grid spacing / pattern step, absolute
};

struct GridOptions
{
    int points_per_axis = 41; // p = 2 grid
    int refinements = 2;
    double refine_factor = 5.0;
    int coarse_points_p3 = 7;      // p = 3 coarse grid before pattern search
    double pattern_min_step = 1e-9; // p = 3 pattern search stops below this step
};

/**
 * Exhaustive minimization of the objective for p in {2, 3}.
 *
 * p = 2: grid over (sigma11, sigma22, sigma12) in a box around S (diagonals
 * in [1e-3 s_ii, 2 s_ii], off-diagonal within s_12 +- sqrt(s_11 s_22)),
 * non-PD points skipped, then refined twice around the incumbent.
 * p = 3: a coarse grid over the same box followed by a compass pattern search.
 *
 * Ties go to the first point in lexicographic grid order. Throws domain error
 * if no grid point is positive definite.
 */
OracleReport oracle_small_problem(const CovarianceMatrix& s, const PenaltySpec& penalty,
                                  const GridOptions& options = {});

/**
 * Most negative one-sided directional derivative of the objective at
 * `sigma_hat`, over the symmetric coordinate directions +-E_ij (i <= j),
 * by forward differences with the given step. If a perturbed point is not
 * positive definite the step is halved for that direction and retried.
 *
 * A value >= -tol indicates a (numerically) stationary point.
 */
double check_stationarity(const CovarianceMatrix& sigma_hat, const CovarianceMatrix& s,
                          const PenaltySpec& penalty, double step);

/// One line per check; `passed` false marks a failure.
using SuiteReporter = std::function<void(const std::string& name, bool passed, const std::string& detail)>;

/// Runs the oracle checks against the solvers. Returns the number of failures.
int run_verification_suite(const SuiteReporter& report);

} // namespace oracle

} // namespace covglasso
