#pragma once

#include <stdexcept>
#include <string>

namespace letf {

/// Invalid argument values (non-positive vol, zero leverage, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A price outside the static no-arbitrage bounds.
class ArbitrageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Root finder failed; carries the last bracket.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double lo, double hi)
        : std::runtime_error(what), lo_(lo), hi_(hi) {}
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

/// An algebraic identity that must hold in the expansion pipeline did not.
class StructuralError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Quadrature or simulation produced an unusable number.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration file or command-line input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested (model, order) combination has no implementation.
class UnsupportedError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace letf
