#pragma once

#include <stdexcept>
#include <string>

namespace fadingld {

// Invalid model ingredients (bounds, normalization, incompatible shapes).
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the domain of a function (negative distance, point outside W, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Bad caller-chosen parameter (zero resolution, nonpositive rate, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Iterative solver did not reach its tolerance.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

// Constraint system has no solution.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fadingld
