#pragma once

#include <covglasso/synthetic.hpp>
#include <covglasso/types.hpp>

#include <iosfwd>
#include <map>
#include <string>

namespace covglasso::io {

/// Plain CSV: one row per line, comma separated, no header. Blank lines are ignored.
Matrix read_matrix_csv(std::istream& in);
Matrix read_matrix_csv(const std::string& path);

/// Square symmetric matrix; asymmetry above 1e-8 is rejected.
CovarianceMatrix read_covariance_csv(const std::string& path);

/// Writes with 17 significant digits so values round-trip exactly.
void write_matrix_csv(std::ostream& out, const Matrix& m);
void write_matrix_csv(const std::string& path, const Matrix& m);

using Metadata = std::map<std::string, std::string>;

/// key=value lines; '#' starts a comment line.
Metadata read_metadata(std::istream& in);
Metadata read_metadata(const std::string& path);
void write_metadata(const std::string& path, const Metadata& meta);

struct DatasetFiles
{
    std::string y_path;
    std::string sigma_path;
    std::string s_path;
    std::string meta_path;
};

/**
 * Writes <dir>/<stem>_Y.csv, <stem>_sigma.csv (true covariance), <stem>_S.csv
 * and the sidecar <stem>.meta with kind, p, n, seed and delta (the diagonal
 * of the true covariance).
 */
DatasetFiles write_dataset(const Dataset& data, const std::string& dir, const std::string& stem);

} // namespace covglasso::io
