#pragma once

#include <stdexcept>

namespace levy_radner {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a structural invariant (shapes, symmetry, positivity...).
class StructuralError : public Error {
public:
    using Error::Error;
};

/// The measure puts no mass on z^(0) != 0, so the Sharpe ratio is undefined.
class DegenerateMeasure : public Error {
public:
    using Error::Error;
};

/// An exponential moment would exceed the representable range.
class OverflowGuard : public Error {
public:
    using Error::Error;
};

class BracketFailure : public Error {
public:
    using Error::Error;
};

class MaxIterExceeded : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of a time-dependent quantity.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Measure has no finite total mass and cannot be simulated exactly.
class UnsupportedMeasure : public Error {
public:
    using Error::Error;
};

class GridError : public Error {
public:
    using Error::Error;
};

/// Config file could not be read or lacks a required field.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace levy_radner
