#include <covglasso/bench.hpp>

#include <covglasso/core.hpp>
#include <covglasso/solver_cd.hpp>
#include <covglasso/solver_ecm.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

namespace covglasso::bench {

const char* to_string(Solver s)
{
    return s == Solver::cd ? "cd" : "ecm";
}

const char* to_string(Init i)
{
    return i == Init::full ? "full" : "diag";
}

Solver parse_solver(const std::string& name)
{
    if (name == "cd" || name == "CD") return Solver::cd;
    if (name == "ecm" || name == "ECM") return Solver::ecm;
    throw_invalid("unknown solver '" + name + "' (expected cd or ecm)");
}

Init parse_init(const std::string& name)
{
    if (name == "full") return Init::full;
    if (name == "diag") return Init::diag;
    throw_invalid("unknown init '" + name + "' (expected full or diag)");
}

void ExperimentPlan::validate() const
{
    if (models.empty()) throw_invalid("plan has no models");
    for (const auto& m : models) {
        ModelSpec probe = m;
        probe.validate();
    }
    if (replicate_seeds.empty()) throw_invalid("plan has no seeds");
    if (solvers.empty()) throw_invalid("plan has no solvers");
    if (inits.empty()) throw_invalid("plan has no inits");
    if (repeats < 1) throw_invalid("repeats must be >= 1");
    if (threads < 1) throw_invalid("threads must be >= 1");
    if (!rho_grid.values.empty()) {
        for (std::size_t k = 0; k < rho_grid.values.size(); ++k) {
            if (!(rho_grid.values[k] >= 0.0)) throw_invalid("rho values must be >= 0");
            if (k > 0 && !(rho_grid.values[k] > rho_grid.values[k - 1])) {
                throw_invalid("rho values must be strictly increasing");
            }
        }
    } else {
        if (rho_grid.count < 1) throw_invalid("rho_count must be >= 1");
        if (!(rho_grid.min_ratio > 0.0 && rho_grid.min_ratio <= 1.0)) {
            throw_invalid("rho_min_ratio must be in (0, 1]");
        }
        if (rho_grid.count > 1 && rho_grid.min_ratio == 1.0) {
            throw_invalid("rho_min_ratio = 1 gives repeated grid values");
        }
    }
    config.validate();
}

bool RunRecord::same_cell(const RunRecord& o) const
{
    return model == o.model && p == o.p && n == o.n && seed == o.seed && rho == o.rho && init == o.init;
}

bool record_less(const RunRecord& a, const RunRecord& b)
{
    return std::make_tuple(static_cast<int>(a.model), a.p, a.seed, a.rho, static_cast<int>(a.solver),
                           static_cast<int>(a.init), a.n)
           < std::make_tuple(static_cast<int>(b.model), b.p, b.seed, b.rho, static_cast<int>(b.solver),
                             static_cast<int>(b.init), b.n);
}

double diagonalizing_rho(const CovarianceMatrix& s, const SolverConfig& cfg)
{
    const Index p = s.dim();
    if (p < 2) throw_invalid("diagonalizing_rho: need p >= 2");
    double start = 0.0;
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < j; ++i) {
            start = std::max(start, std::abs(s(i, j)) / (s(i, i) * s(j, j)));
        }
    }
    if (start == 0.0) return 0.0;
    // lower estimate of the threshold at which S's own diagonal stops the first lasso step
    double rho = 0.25 * start;
    SolverConfig c = cfg;
    c.init = InitStrategy::full();
    for (int k = 0; k < 64; ++k, rho *= 2.0) {
        const SolverResult r = solve_cd(s, rho, c);
        if (r.nonzero_fraction == 0.0) return rho;
    }
    throw_numerical("diagonalizing_rho: no diagonal solution after 64 doublings");
}

std::vector<double> make_rho_grid(const RhoGrid& grid, const CovarianceMatrix& s, const SolverConfig& cfg)
{
    if (!grid.values.empty()) return grid.values;
    const double top = grid.max > 0.0 ? grid.max : diagonalizing_rho(s, cfg);
    if (grid.count == 1) return {top};
    std::vector<double> values(static_cast<std::size_t>(grid.count));
    const double lo = std::log(top * grid.min_ratio);
    const double hi = std::log(top);
    for (int k = 0; k < grid.count; ++k) {
        values[static_cast<std::size_t>(k)] = std::exp(lo + (hi - lo) * k / (grid.count - 1));
    }
    values.back() = top;
    return values;
}

std::vector<SolverResult> regularization_path(const CovarianceMatrix& s, const std::vector<double>& rhos,
                                              Solver solver, const SolverConfig& cfg)
{
    std::vector<SolverResult> out;
    out.reserve(rhos.size());
    SolverConfig c = cfg;
    for (double rho : rhos) {
        out.push_back(solver == Solver::cd ? solve_cd(s, rho, c) : solve_ecm(s, rho, c));
        c.init = InitStrategy::from(out.back().sigma_hat.matrix());
    }
    return out;
}

namespace {

struct Cell
{
    std::size_t dataset;
    double rho;
    Solver solver;
    Init init;
};

RunRecord run_cell(const Dataset& data, const Cell& cell, const ExperimentPlan& plan)
{
    RunRecord rec;
    rec.model = data.spec.kind;
    rec.p = data.spec.p;
    rec.n = data.spec.n;
    rec.seed = data.spec.seed;
    rec.rho = cell.rho;
    rec.solver = cell.solver;
    rec.init = cell.init;

    SolverConfig cfg = plan.config;
    if (cell.init == Init::full) {
        cfg.init = InitStrategy::full();
    } else {
        cfg.init = cell.solver == Solver::cd ? InitStrategy::diagonal() : InitStrategy::diagonal_plus(1e-3);
    }

    try {
        std::vector<double> times;
        SolverResult result;
        for (int r = 0; r < plan.repeats; ++r) {
            result = cell.solver == Solver::cd ? solve_cd(data.s, cell.rho, cfg) : solve_ecm(data.s, cell.rho, cfg);
            times.push_back(result.wall_time);
        }
        std::sort(times.begin(), times.end());
        const std::size_t mid = times.size() / 2;
        rec.wall_time_seconds = times.size() % 2 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
        rec.outer_iters = result.outer_iters;
        rec.pct_nonzero = result.nonzero_fraction;
        rec.objective_value = result.objective_trace.back();
        rec.converged = result.converged;
    } catch (const std::exception& e) {
        rec.converged = false;
        rec.error = e.what();
        rec.objective_value = std::numeric_limits<double>::quiet_NaN();
    }
    return rec;
}

template <class F>
void parallel_for(std::size_t count, int threads, F&& body)
{
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || count < 2) {
        for (std::size_t k = 0; k < count; ++k) body(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w) {
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < count; k = next++) body(k);
        });
    }
}

} // namespace

std::vector<RunRecord> run_experiment(const ExperimentPlan& plan)
{
    plan.validate();

    std::vector<Dataset> datasets;
    for (const auto& model : plan.models) {
        for (auto seed : plan.replicate_seeds) {
            ModelSpec spec = model;
            spec.seed = seed;
            datasets.push_back(generate_dataset(spec));
        }
    }

    std::vector<std::vector<double>> grids(datasets.size());
    std::vector<std::string> grid_errors(datasets.size());
    parallel_for(datasets.size(), plan.threads, [&](std::size_t d) {
        try {
            grids[d] = make_rho_grid(plan.rho_grid, datasets[d].s, plan.config);
        } catch (const std::exception& e) {
            grid_errors[d] = e.what();
        }
    });

    std::vector<Cell> cells;
    std::vector<RunRecord> records;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        if (!grid_errors[d].empty()) {
            RunRecord rec;
            rec.model = datasets[d].spec.kind;
            rec.p = datasets[d].spec.p;
            rec.n = datasets[d].spec.n;
            rec.seed = datasets[d].spec.seed;
            rec.rho = 0.0;
            rec.objective_value = std::numeric_limits<double>::quiet_NaN();
            rec.error = "rho grid: " + grid_errors[d];
            records.push_back(rec);
            continue;
        }
        for (double rho : grids[d]) {
            for (auto solver : plan.solvers) {
                for (auto init : plan.inits) cells.push_back({d, rho, solver, init});
            }
        }
    }

    const std::size_t offset = records.size();
    records.resize(offset + cells.size());
    parallel_for(cells.size(), plan.threads, [&](std::size_t k) {
        records[offset + k] = run_cell(datasets[cells[k].dataset], cells[k], plan);
    });
    std::stable_sort(records.begin(), records.end(), record_less);
    return records;
}

long nonzero_edges(double fraction, int p)
{
    const double pairs = 0.5 * static_cast<double>(p) * static_cast<double>(p - 1);
    return std::lround(fraction * pairs);
}

RelativeObjectives relative_objective(const std::vector<RunRecord>& records)
{
    RelativeObjectives out;
    for (const auto& cd : records) {
        if (cd.solver != Solver::cd) continue;
        const auto ecm = std::find_if(records.begin(), records.end(), [&](const RunRecord& r) {
            return r.solver == Solver::ecm && r.same_cell(cd);
        });
        if (ecm == records.end()) {
            std::ostringstream msg;
            msg << "no ECM record for " << to_string(cd.model) << " p=" << cd.p << " seed=" << cd.seed
                << " rho=" << cd.rho << " init=" << to_string(cd.init);
            out.warnings.push_back(msg.str());
            continue;
        }
        out.rows.push_back({cd, cd.objective_value - ecm->objective_value, nonzero_edges(cd.pct_nonzero, cd.p)});
    }
    for (const auto& ecm : records) {
        if (ecm.solver != Solver::ecm) continue;
        const bool has_cd = std::any_of(records.begin(), records.end(), [&](const RunRecord& r) {
            return r.solver == Solver::cd && r.same_cell(ecm);
        });
        if (!has_cd) {
            std::ostringstream msg;
            msg << "no CD record for " << to_string(ecm.model) << " p=" << ecm.p << " seed=" << ecm.seed
                << " rho=" << ecm.rho << " init=" << to_string(ecm.init);
            out.warnings.push_back(msg.str());
        }
    }
    return out;
}

namespace {

std::ofstream open_report(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw_io("cannot open '" + path.string() + "' for writing");
    out << std::setprecision(17);
    return out;
}

void write_key(std::ostream& out, const RunRecord& r)
{
    out << to_string(r.model) << ',' << r.p << ',' << r.n << ',' << r.seed << ',' << r.rho;
}

std::string quote_csv(const std::string& s)
{
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += (c == '\n' || c == '\r') ? ' ' : c;
    }
    return q + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char c = line[k];
        if (quoted) {
            if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
                cur += '"';
                ++k;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

template <class T>
T parse_number(const std::string& s, const char* what)
{
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw_invalid(std::string("cannot parse ") + what + " from '" + s + "'");
    }
    return v;
}

} // namespace

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& records, double zero_report_threshold)
{
    out << std::setprecision(17);
    out << "# pct_nonzero is the fraction of off-diagonal entries counted as nonzero: "
           "exact nonzeros for cd, |sigma_ij| > "
        << zero_report_threshold << " for ecm\n";
    out << "# wall_time_s covers the solve call only\n";
    out << runs_header << '\n';
    for (const auto& r : records) {
        write_key(out, r);
        out << ',' << to_string(r.solver) << ',' << to_string(r.init) << ',' << r.wall_time_seconds << ','
            << r.outer_iters << ',' << r.pct_nonzero << ',' << r.objective_value << '\n';
    }
}

std::vector<RunRecord> read_runs_csv(std::istream& in)
{
    std::vector<RunRecord> records;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != runs_header) throw_invalid("runs.csv: unexpected header '" + line + "'");
            header_seen = true;
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 11) throw_invalid("runs.csv: expected 11 fields, got " + std::to_string(f.size()));
        RunRecord r;
        r.model = parse_model_kind(f[0]);
        r.p = parse_number<int>(f[1], "p");
        r.n = parse_number<int>(f[2], "n");
        r.seed = parse_number<std::uint64_t>(f[3], "seed");
        r.rho = parse_number<double>(f[4], "rho");
        r.solver = parse_solver(f[5]);
        r.init = parse_init(f[6]);
        r.wall_time_seconds = parse_number<double>(f[7], "wall_time_s");
        r.outer_iters = parse_number<int>(f[8], "outer_iters");
        r.pct_nonzero = parse_number<double>(f[9], "pct_nonzero");
        r.objective_value = parse_number<double>(f[10], "objective");
        r.converged = true;
        records.push_back(r);
    }
    if (!header_seen) throw_invalid("runs.csv: missing header");
    return records;
}

ReportFiles emit_report(const std::vector<RunRecord>& records, const std::string& dir,
                        double zero_report_threshold)
{
    if (records.empty()) throw_invalid("emit_report: no records");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw_io("cannot create directory '" + dir + "': " + ec.message());
    const std::filesystem::path base(dir);
    ReportFiles files{(base / "runs.csv").string(), (base / "status.csv").string(),
                      (base / "time_vs_nonzeros.csv").string(), (base / "relobj_vs_nonzeros.csv").string()};

    {
        auto out = open_report(files.runs);
        write_runs_csv(out, records, zero_report_threshold);
        if (!out) throw_io("failed writing '" + files.runs + "'");
    }
    {
        auto out = open_report(files.status);
        out << "model,p,n,seed,rho,solver,init,converged,error\n";
        for (const auto& r : records) {
            write_key(out, r);
            out << ',' << to_string(r.solver) << ',' << to_string(r.init) << ',' << (r.converged ? 1 : 0) << ','
                << quote_csv(r.error) << '\n';
        }
        if (!out) throw_io("failed writing '" + files.status + "'");
    }
    {
        auto out = open_report(files.time_vs_nonzeros);
        out << "model,p,n,seed,rho,init,solver,cd_nonzero_edges,wall_time_s\n";
        for (const auto& r : records) {
            const auto cd = std::find_if(records.begin(), records.end(), [&](const RunRecord& o) {
                return o.solver == Solver::cd && o.same_cell(r);
            });
            if (cd == records.end() || !cd->error.empty()) continue;
            write_key(out, r);
            out << ',' << to_string(r.init) << ',' << to_string(r.solver) << ','
                << nonzero_edges(cd->pct_nonzero, cd->p) << ',' << r.wall_time_seconds << '\n';
        }
        if (!out) throw_io("failed writing '" + files.time_vs_nonzeros + "'");
    }
    {
        auto out = open_report(files.relobj_vs_nonzeros);
        out << "model,p,n,seed,rho,init,cd_nonzero_edges,relobj_cd_minus_ecm\n";
        for (const auto& row : relative_objective(records).rows) {
            write_key(out, row.cd);
            out << ',' << to_string(row.cd.init) << ',' << row.cd_nonzero_edges << ',' << row.value << '\n';
        }
        if (!out) throw_io("failed writing '" + files.relobj_vs_nonzeros + "'");
    }
    return files;
}

std::vector<RunRecord> read_report(const std::string& dir)
{
    const std::filesystem::path base(dir);
    std::ifstream runs(base / "runs.csv");
    if (!runs) throw_io("cannot open '" + (base / "runs.csv").string() + "'");
    auto records = read_runs_csv(runs);

    std::ifstream status(base / "status.csv");
    if (!status) return records;
    std::string line;
    std::getline(status, line); // header
    std::size_t k = 0;
    while (std::getline(status, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 9 || k >= records.size()) throw_invalid("status.csv does not match runs.csv");
        records[k].converged = f[7] == "1";
        records[k].error = f[8];
        ++k;
    }
    if (k != records.size()) throw_invalid("status.csv does not match runs.csv");
    return records;
}

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

ModelSpec parse_model(const std::string& text)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(trim(item));
    if (parts.size() != 3) throw_invalid("model '" + text + "' should look like kind:p:n");
    ModelSpec m;
    m.kind = parse_model_kind(parts[0]);
    m.p = parse_number<int>(parts[1], "p");
    m.n = parse_number<int>(parts[2], "n");
    return m;
}

} // namespace

ExperimentPlan parse_plan(std::istream& in)
{
    ExperimentPlan plan;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw_invalid("plan line " + std::to_string(line_no) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "models") {
            plan.models.clear();
            for (const auto& m : split_list(value)) plan.models.push_back(parse_model(m));
        } else if (key == "seeds") {
            plan.replicate_seeds.clear();
            for (const auto& s : split_list(value)) plan.replicate_seeds.push_back(parse_number<std::uint64_t>(s, "seed"));
        } else if (key == "rho") {
            plan.rho_grid.values.clear();
            for (const auto& s : split_list(value)) plan.rho_grid.values.push_back(parse_number<double>(s, "rho"));
        } else if (key == "rho_count") {
            plan.rho_grid.count = parse_number<int>(value, "rho_count");
        } else if (key == "rho_min_ratio") {
            plan.rho_grid.min_ratio = parse_number<double>(value, "rho_min_ratio");
        } else if (key == "rho_max") {
            plan.rho_grid.max = value == "auto" ? 0.0 : parse_number<double>(value, "rho_max");
        } else if (key == "solvers") {
            plan.solvers.clear();
            for (const auto& s : split_list(value)) plan.solvers.push_back(parse_solver(s));
        } else if (key == "inits") {
            plan.inits.clear();
            for (const auto& s : split_list(value)) plan.inits.push_back(parse_init(s));
        } else if (key == "outer_tol") {
            plan.config.outer_tol = parse_number<double>(value, key.c_str());
        } else if (key == "inner_tol") {
            plan.config.inner_tol = parse_number<double>(value, key.c_str());
        } else if (key == "max_outer_iters") {
            plan.config.max_outer_iters = parse_number<int>(value, key.c_str());
        } else if (key == "max_inner_iters") {
            plan.config.max_inner_iters = parse_number<int>(value, key.c_str());
        } else if (key == "zero_report_threshold") {
            plan.config.zero_report_threshold = parse_number<double>(value, key.c_str());
        } else if (key == "ecm_scale_floor") {
            plan.config.ecm_scale_floor = parse_number<double>(value, key.c_str());
        } else if (key == "repeats") {
            plan.repeats = parse_number<int>(value, key.c_str());
        } else if (key == "threads") {
            plan.threads = parse_number<int>(value, key.c_str());
        } else {
            throw_invalid("plan line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    plan.validate();
    return plan;
}

ExperimentPlan read_plan(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw_io("cannot open plan file '" + path + "'");
    return parse_plan(in);
}

} // namespace covglasso::bench
