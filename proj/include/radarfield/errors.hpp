#pragma once

#include <stdexcept>
#include <string>

namespace radarfield {

/// Bad user input: out-of-range parameters, malformed sweep specs,
/// violated preconditions. Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical routine (quadrature, root bracketing) failed to reach its
/// target tolerance. Carries the tolerance actually achieved. Maps to CLI
/// exit code 3.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double achieved_tol)
        : std::runtime_error(what + " (achieved tolerance " + std::to_string(achieved_tol) + ")"),
          achieved_tolerance(achieved_tol) {}
    double achieved_tolerance;
};

/// A requested simulation exceeds the configured resource budget
/// (e.g. expected point count above the cap). Maps to CLI exit code 3.
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace radarfield
