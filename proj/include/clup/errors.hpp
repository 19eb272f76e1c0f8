#ifndef CLUP_ERRORS_HPP
#define CLUP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace clup {

// Invalid user-facing configuration (dims, schedules, CLI/config files).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Argument outside a mathematical domain (e.g. |p| >= 1 for erfinv).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// The ball radius is below the minimum achievable residual over the box.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& what, double min_residual)
        : std::runtime_error(what), min_residual(min_residual) {}
    double min_residual;
};

// An iterative method exhausted its budget without meeting its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double best_criterion)
        : std::runtime_error(what), best_criterion(best_criterion) {}
    double best_criterion;
};

// Bundled dataset could not be read or failed its integrity check.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace clup

#endif
