#pragma once

#include <stdexcept>
#include <string>

namespace kissing {

// Bad input: maps to exit code 2 in the CLI.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Convergence or conditioning failure: exit code 3.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double diagnostic = 0.0)
        : std::runtime_error(what), diagnostic_(diagnostic)
    {
    }
    double diagnostic() const { return diagnostic_; }

private:
    double diagnostic_;
};

// 2*kappa - c too close to 2*pi*Z: exit code 4.
class ThetaStarError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace kissing
