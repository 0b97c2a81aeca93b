#pragma once

#include <stdexcept>
#include <string>

namespace mdi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed graph document or a graph that violates a structural invariant.
class GraphError : public Error {
public:
    using Error::Error;
};

/// Inconsistent structural / response model, preset or experiment config.
class SpecError : public Error {
public:
    using Error::Error;
};

/// Dataset shape or content problems (length mismatch, NA where forbidden, ...).
class DataError : public Error {
public:
    using Error::Error;
};

/// Exhaustive ordering search refused because the variable count is too large.
class SizeLimitError : public Error {
public:
    using Error::Error;
};

/// A method that needs a decomposable ordering was asked to run without one.
class OrderingError : public Error {
public:
    using Error::Error;
};

}  // namespace mdi
