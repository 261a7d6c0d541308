#pragma once

#include <stdexcept>
#include <string>

namespace irskg {

// Malformed or inconsistent configuration (bad key, bad value, invalid plan).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Precondition on an argument violated (e.g. a non-unit-modulus phase vector).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Singular covariance where a determinant or inverse is required.
class DegenerateInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An iterative solver hit its iteration cap before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, int iterations, double residual)
        : std::runtime_error(what), iterations_(iterations), residual_(residual) {}

    int iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    int iterations_;
    double residual_;
};

// A requested computation exceeds a fixed work budget.
class BudgetError : public std::length_error {
public:
    using std::length_error::length_error;
};

}  // namespace irskg
