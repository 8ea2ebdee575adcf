#pragma once

#include <stdexcept>
#include <string>

namespace bec {

/// Violated precondition on sizes or arguments (length mismatch, bad index).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parameter outside the mathematical domain (non-positive coefficient, eps > 1, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Numerical failure at run time: singular block, diverging smoother, lost conjugate symmetry.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent run configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw ContractError(what);
}

}  // namespace bec
