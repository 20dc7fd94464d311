#pragma once

#include <stdexcept>
#include <string>

namespace ttsl {

/// Incompatible tensor/matrix dimensions.
class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

/// Invalid argument value (out-of-range index, empty input, bad enum, ...).
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

/// An operation would exceed a configured resource cap (e.g. densifying a
/// tensor train whose dense form does not fit in memory).
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: divergence, NaN/inf iterates, singular matrix.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ttsl
