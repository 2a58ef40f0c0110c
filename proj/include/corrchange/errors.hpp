#pragma once

#include <stdexcept>
#include <string>

namespace corrchange {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: files, configs, arguments, shape mismatches.
class InputError : public Error {
public:
    using Error::Error;
};

/// Data too degenerate to compute on (constant columns, zero bootstrap
/// variance, empty deviation processes).
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

/// A matrix that must be positive definite is not, even after ridging.
class NotPositiveDefiniteError : public Error {
public:
    NotPositiveDefiniteError(const std::string& what, double min_eigenvalue)
        : Error(what), min_eigenvalue_(min_eigenvalue) {}

    double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

}  // namespace corrchange
