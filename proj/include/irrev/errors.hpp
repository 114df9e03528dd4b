#pragma once

#include <stdexcept>
#include <string>

namespace irrev {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input failed a structural invariant; carries the measured violation.
struct ValidationError : Error {
    ValidationError(const std::string& msg, double violation)
        : Error(msg), violation(violation) {}
    double violation;
};

struct NotHermitian : ValidationError {
    using ValidationError::ValidationError;
};
struct NotUnitTrace : ValidationError {
    using ValidationError::ValidationError;
};
struct NotPositive : ValidationError {
    using ValidationError::ValidationError;
};
struct DimMismatch : Error {
    using Error::Error;
};
struct SingularPower : Error {
    using Error::Error;
};
struct NotUnital : Error {
    using Error::Error;
};

// Forward mass on a backward-zero outcome cell (absolute irreversibility).
struct InfiniteSigma : Error {
    InfiniteSigma(const std::string& msg, int k, int m)
        : Error(msg), fin_index(k), in_index(m) {}
    int fin_index;
    int in_index;
};

struct InequalityViolated : Error {
    using Error::Error;
};
struct DegenerateSampling : Error {
    using Error::Error;
};
struct UnstableStep : Error {
    using Error::Error;
};
struct GridTooCoarse : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace irrev
