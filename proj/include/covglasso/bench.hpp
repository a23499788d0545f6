#pragma once

#include <covglasso/synthetic.hpp>
#include <covglasso/types.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace covglasso::bench {

enum class Solver { cd, ecm };
enum class Init { full, diag };

const char* to_string(Solver s);
const char* to_string(Init i);
Solver parse_solver(const std::string& name);
Init parse_init(const std::string& name);

/**
 * Either an explicit strictly increasing list, or `count` log-spaced values
 * from max * min_ratio up to max. max <= 0 means "find it": the smallest
 * doubling of a starting guess at which CD (started at S) returns a diagonal
 * estimate.
 */
struct RhoGrid
{
    std::vector<double> values;
    int count = 20;
    double min_ratio = 1e-3;
    double max = 0.0;
};

struct ExperimentPlan
{
    std::vector<ModelSpec> models; // the seed field is replaced by each replicate seed
    std::vector<std::uint64_t> replicate_seeds{1};
    RhoGrid rho_grid;
    std::vector<Solver> solvers{Solver::cd, Solver::ecm};
    std::vector<Init> inits{Init::full};
    SolverConfig config;
    int repeats = 1; // wall time is the median over repeats
    int threads = 1;

    void validate() const;
};

struct RunRecord
{
    ModelKind model = ModelKind::sparse_tridiagonal;
    int p = 0;
    int n = 0;
    std::uint64_t seed = 0;
    double rho = 0.0;
    Solver solver = Solver::cd;
    Init init = Init::full;
    double wall_time_seconds = 0.0;
    int outer_iters = 0;
    double pct_nonzero = 0.0; // fraction in [0, 1] of off-diagonal entries
    double objective_value = 0.0;
    bool converged = false;
    std::string error; // non-empty when the cell failed; objective is then NaN

    bool same_cell(const RunRecord& other) const; // everything but solver
};

/// Orders records by (model, p, seed, rho, solver, init), then n.
bool record_less(const RunRecord& a, const RunRecord& b);

/// Smallest rho (by doubling) at which solve_cd from S is exactly diagonal.
double diagonalizing_rho(const CovarianceMatrix& s, const SolverConfig& cfg);

std::vector<double> make_rho_grid(const RhoGrid& grid, const CovarianceMatrix& s, const SolverConfig& cfg);

/**
 * Solves along `rhos` in the given order. The first point starts from
 * cfg.init; each later point starts from the previous estimate.
 */
std::vector<SolverResult> regularization_path(const CovarianceMatrix& s, const std::vector<double>& rhos,
                                              Solver solver, const SolverConfig& cfg);

/**
 * One record per (model, seed, rho, solver, init). Full starts at S; Diag
 * starts at diag(S) for CD and diag(S) + 1e-3 for ECM. A failing cell is
 * recorded with converged = false and an error message; the sweep goes on.
 * Output is sorted with record_less.
 */
std::vector<RunRecord> run_experiment(const ExperimentPlan& plan);

struct RelativeObjective
{
    RunRecord cd; // the CD record of the cell
    double value = 0.0; // g(CD) - g(ECM); negative means CD found the lower point
    long cd_nonzero_edges = 0;
};

struct RelativeObjectives
{
    std::vector<RelativeObjective> rows;
    std::vector<std::string> warnings; // cells lacking a counterpart
};

RelativeObjectives relative_objective(const std::vector<RunRecord>& records);

/// Number of off-diagonal pairs i < j behind a nonzero fraction.
long nonzero_edges(double fraction, int p);

inline constexpr const char* runs_header =
    "model,p,n,seed,rho,solver,init,wall_time_s,outer_iters,pct_nonzero,objective";

struct ReportFiles
{
    std::string runs;
    std::string status;
    std::string time_vs_nonzeros;
    std::string relobj_vs_nonzeros;
};

/**
 * Writes into `dir`:
 *   runs.csv               '#' comment lines, then runs_header and one row per record
 *   status.csv             converged flag and error text per record
 *   time_vs_nonzeros.csv   wall time per solver against the CD nonzero edge count
 *   relobj_vs_nonzeros.csv g_CD - g_ECM per cell against the CD nonzero edge count
 */
ReportFiles emit_report(const std::vector<RunRecord>& records, const std::string& dir,
                        double zero_report_threshold = 1e-4);

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& records, double zero_report_threshold);
std::vector<RunRecord> read_runs_csv(std::istream& in);

/// runs.csv merged with status.csv when present.
std::vector<RunRecord> read_report(const std::string& dir);

/**
 * key=value plan file. Keys: models (kind:p:n list), seeds, rho (explicit
 * list), rho_count, rho_min_ratio, rho_max (number or "auto"), solvers,
 * inits, outer_tol, inner_tol, max_outer_iters, max_inner_iters,
 * zero_report_threshold, ecm_scale_floor, repeats, threads. Lists are comma
 * separated; '#' starts a comment.
 */
ExperimentPlan parse_plan(std::istream& in);
ExperimentPlan read_plan(const std::string& path);

} // namespace covglasso::bench
