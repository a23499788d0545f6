#pragma once

#include <Eigen/Core>
#include <optional>
#include <stdexcept>
#include <string>

namespace covglasso {

enum class ErrorKind {
    invalid_input,
    domain,
    degenerate_subproblem,
    numerical,
    io,
};

const char* to_string(ErrorKind kind);

/**
 * Base exception for everything the library throws on purpose.
 *
 * `kind()` is what the C API maps to a status code. Degenerate subproblems
 * carry the 0-based column index at which the block update broke down.
 */
class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& msg,
          std::optional<Eigen::Index> column = std::nullopt)
        : std::runtime_error(msg), kind_(kind), column_(column)
    {}

    ErrorKind kind() const noexcept { return kind_; }
    std::optional<Eigen::Index> column() const noexcept { return column_; }

private:
    ErrorKind kind_;
    std::optional<Eigen::Index> column_;
};

[[noreturn]] inline void throw_invalid(const std::string& msg)
{
    throw Error(ErrorKind::invalid_input, msg);
}

[[noreturn]] inline void throw_domain(const std::string& msg)
{
    throw Error(ErrorKind::domain, msg);
}

[[noreturn]] inline void throw_numerical(const std::string& msg)
{
    throw Error(ErrorKind::numerical, msg);
}

[[noreturn]] inline void throw_io(const std::string& msg)
{
    throw Error(ErrorKind::io, msg);
}

} // namespace covglasso
