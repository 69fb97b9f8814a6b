#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ampr {

/// Invalid numeric argument (negative variance, non-positive curvature, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Inconsistent array shapes between inputs.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid experiment or solver configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// File system / network failures.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed tabular input; carries the 1-based row and column of the bad cell.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t row, std::size_t column)
        : std::runtime_error(what), row_(row), column_(column) {}
    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

/// An iterative scheme produced a non-finite value.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, int sweep)
        : std::runtime_error(what + " (sweep " + std::to_string(sweep) + ")"), sweep_(sweep) {}
    int sweep() const noexcept { return sweep_; }

private:
    int sweep_;
};

/// An iterative engine stopped at its iteration cap before converging.
class NonConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An inner Lasso solve failed inside a resampling run.
class ResampleError : public std::runtime_error {
public:
    ResampleError(const std::string& what, std::uint64_t seed_tag)
        : std::runtime_error(what + " (seed_tag " + std::to_string(seed_tag) + ")"),
          seed_tag_(seed_tag) {}
    std::uint64_t seed_tag() const noexcept { return seed_tag_; }

private:
    std::uint64_t seed_tag_;
};

}  // namespace ampr
