#pragma once

#include <stdexcept>
#include <string>

namespace polar {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on the input data does not hold (too few users, empty map, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A file could not be read or has an unusable format.
class IoError : public Error {
public:
    using Error::Error;
};

/// Numerical failure: zero variance, rank deficiency, no convergence.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A configuration file or flag is malformed.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// An input a pipeline stage depends on does not exist or is empty.
class MissingArtifactError : public IoError {
public:
    using IoError::IoError;
};

}  // namespace polar
