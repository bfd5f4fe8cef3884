#pragma once

#include <stdexcept>
#include <string>

namespace advdiff {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidMeshError : public Error {
public:
    using Error::Error;
};

class InvalidContinuityError : public Error {
public:
    using Error::Error;
};

class OutOfDomainError : public Error {
public:
    using Error::Error;
};

class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

class InsufficientPointsError : public Error {
public:
    using Error::Error;
};

class UnderdeterminedError : public Error {
public:
    using Error::Error;
};

class UnsupportedDegreeError : public Error {
public:
    using Error::Error;
};

/// Linear solve failed; carries the reciprocal condition estimate of the factorized matrix.
class SolverFailureError : public Error {
public:
    SolverFailureError(const std::string& what, double rcond)
        : Error(what), rcond_(rcond) {}

    double rcond() const noexcept { return rcond_; }

private:
    double rcond_;
};

/// A loss, gradient or parameter became NaN/Inf during training.
class NonFiniteError : public Error {
public:
    NonFiniteError(const std::string& what, long epoch)
        : Error(what), epoch_(epoch) {}

    long epoch() const noexcept { return epoch_; }

private:
    long epoch_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace advdiff
