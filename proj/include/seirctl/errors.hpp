#ifndef SEIRCTL_ERRORS_HPP
#define SEIRCTL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace seirctl {

/// Invalid numeric input to a model/solver operation (non-finite state, N <= 0, ...).
struct DomainError : std::domain_error {
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Malformed or inconsistent run configuration.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Unreadable, malformed, or inconsistent input data.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// The successive-approximation loop blew past its divergence guard.
struct DivergenceError : std::runtime_error {
    explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// A scheduled-control target could not be met inside the parameter box.
struct UnreachableTargetError : std::runtime_error {
    explicit UnreachableTargetError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace seirctl

#endif // SEIRCTL_ERRORS_HPP
