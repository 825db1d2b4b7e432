#pragma once

#include <stdexcept>
#include <string>

namespace realpos {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range input (non-square, non-finite, bad flag values).
class InputError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure broke down (overflow, singular solve, no convergence).
class NumericError : public Error {
public:
    using Error::Error;
};

/// A mathematical precondition of the operation does not hold
/// (for example the argument is not accretive).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// The requested operation is not available for this kind of input.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

}  // namespace realpos
