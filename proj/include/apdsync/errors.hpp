#pragma once

#include <stdexcept>
#include <string>

namespace apdsync {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration or violated parameter invariant. CLI exit code 1.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Numerical failure during integration or analysis (non-finite derivative,
/// step-size underflow, unphysical moments). CLI exit code 2.
class NumericsError : public Error {
public:
    explicit NumericsError(const std::string& what) : Error(what) {}
};

/// Out-of-domain query: interpolation outside a trajectory, mismatched
/// series grids, series too short for the requested analysis.
class RangeError : public Error {
public:
    explicit RangeError(const std::string& what) : Error(what) {}
};

} // namespace apdsync
