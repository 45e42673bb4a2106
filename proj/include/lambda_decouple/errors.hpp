// errors.hpp: exception types shared by the lambda_decouple modules

#pragma once

#include <stdexcept>
#include <string>

namespace lambda_decouple {

// Raised when a caller passes parameters that violate a documented precondition.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Raised when a numerical routine cannot reach its requested accuracy.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, double error_estimate)
        : std::runtime_error(what), error_estimate_(error_estimate) {}

    double error_estimate() const noexcept { return error_estimate_; }

private:
    double error_estimate_;
};

// Raised when a Fock-space truncation leaks more thermal weight than allowed.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, double top_occupancy)
        : std::runtime_error(what), top_occupancy_(top_occupancy) {}

    double top_occupancy() const noexcept { return top_occupancy_; }

private:
    double top_occupancy_;
};

} // namespace lambda_decouple
