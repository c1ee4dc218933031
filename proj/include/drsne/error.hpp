#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "drsne/matrix.hpp"

namespace drsne {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input or configuration. The CLI maps this to exit code 2.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// File system or parse failure.
class IoError : public Error {
public:
    using Error::Error;
};

/// Optimization produced a non-finite value. Carries the last finite coordinates.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, std::size_t iteration, Matrix last_finite)
        : Error(what), iteration_(iteration), last_finite_(std::move(last_finite)) {}

    std::size_t iteration() const noexcept { return iteration_; }
    const Matrix& last_finite_state() const noexcept { return last_finite_; }

private:
    std::size_t iteration_;
    Matrix last_finite_;
};

}  // namespace drsne
