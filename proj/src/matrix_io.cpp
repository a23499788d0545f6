#include <covglasso/matrix_io.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace covglasso::io {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& field, std::size_t line_no)
{
    const std::string t = trim(field);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw_invalid("CSV line " + std::to_string(line_no) + ": cannot parse '" + t + "' as a number");
    }
    return v;
}

std::ifstream open_in(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw_io("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw_io("cannot open '" + path + "' for writing");
    return out;
}

} // namespace

Matrix read_matrix_csv(std::istream& in)
{
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) row.push_back(parse_double(field, line_no));
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw_invalid("CSV line " + std::to_string(line_no) + " has " + std::to_string(row.size())
                          + " fields, expected " + std::to_string(rows.front().size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw_invalid("CSV matrix is empty");
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

Matrix read_matrix_csv(const std::string& path)
{
    auto in = open_in(path);
    return read_matrix_csv(in);
}

CovarianceMatrix read_covariance_csv(const std::string& path)
{
    const Matrix m = read_matrix_csv(path);
    if (m.rows() != m.cols()) {
        throw_invalid("'" + path + "' is not square (" + std::to_string(m.rows()) + "x"
                      + std::to_string(m.cols()) + ")");
    }
    return CovarianceMatrix(m, 1e-8);
}

void write_matrix_csv(std::ostream& out, const Matrix& m)
{
    out << std::setprecision(17);
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << m(i, j);
        }
        out << '\n';
    }
}

void write_matrix_csv(const std::string& path, const Matrix& m)
{
    auto out = open_out(path);
    write_matrix_csv(out, m);
    if (!out) throw_io("failed writing '" + path + "'");
}

Metadata read_metadata(std::istream& in)
{
    Metadata meta;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw_invalid("line " + std::to_string(line_no) + ": expected key=value, got '" + t + "'");
        }
        meta[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return meta;
}

Metadata read_metadata(const std::string& path)
{
    auto in = open_in(path);
    return read_metadata(in);
}

void write_metadata(const std::string& path, const Metadata& meta)
{
    auto out = open_out(path);
    for (const auto& [key, value] : meta) out << key << '=' << value << '\n';
    if (!out) throw_io("failed writing '" + path + "'");
}

DatasetFiles write_dataset(const Dataset& data, const std::string& dir, const std::string& stem)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw_io("cannot create directory '" + dir + "': " + ec.message());
    const std::filesystem::path base(dir);
    DatasetFiles files{(base / (stem + "_Y.csv")).string(), (base / (stem + "_sigma.csv")).string(),
                       (base / (stem + "_S.csv")).string(), (base / (stem + ".meta")).string()};
    write_matrix_csv(files.y_path, data.y);
    write_matrix_csv(files.sigma_path, data.sigma_true.matrix());
    write_matrix_csv(files.s_path, data.s.matrix());

    std::ostringstream delta;
    delta << std::setprecision(17) << data.sigma_true(0, 0);
    write_metadata(files.meta_path, {{"kind", to_string(data.spec.kind)},
                                     {"p", std::to_string(data.spec.p)},
                                     {"n", std::to_string(data.spec.n)},
                                     {"seed", std::to_string(data.spec.seed)},
                                     {"delta", delta.str()}});
    return files;
}

} // namespace covglasso::io
