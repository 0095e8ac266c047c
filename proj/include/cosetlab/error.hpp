#pragma once

#include <stdexcept>
#include <string>

namespace cosetlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands disagree on the degree n (or a matrix shape).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An index or rank lies outside its valid range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// The requested object is too large for the configured guard.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Input is constant / has zero variance / zero power where a spread is required.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// A group-theoretic precondition (e.g. a double-coset count) does not hold.
class StructureError : public Error {
public:
    using Error::Error;
};

class IncompleteSpectrumError : public Error {
public:
    using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// A checkpoint or other stored artifact failed validation.
class CorruptArtifactError : public Error {
public:
    using Error::Error;
};

} // namespace cosetlab
