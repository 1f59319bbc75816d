#pragma once

#include <stdexcept>
#include <string>

namespace hessian {

/// Argument outside the mathematical domain of an operation (k > n, m > n, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid grid or experiment configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A length parameter is below what the lattice can resolve.
class ResolutionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A documented precondition of a check or solver does not hold.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// No admissible discrete subsolution could be built for a Dirichlet problem.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hessian
