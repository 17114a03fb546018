#pragma once

#include <stdexcept>
#include <string>

namespace fvslv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input: bad ordering, out-of-domain point, mismatched sizes.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Coefficient functions violate a model invariant (e.g. negative diffusion).
class ModelError : public Error {
public:
    using Error::Error;
};

/// A coefficient function returned a non-finite sample.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// Linear solve failed (zero pivot, Krylov non-convergence).
class SolverError : public Error {
public:
    using Error::Error;
};

/// Leverage computation hit a non-positive conditional expectation.
class CalibrationError : public Error {
public:
    using Error::Error;
};

/// Implied volatility inversion failed.
class InversionError : public Error {
public:
    using Error::Error;
};

/// Malformed experiment configuration or input file.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace fvslv
