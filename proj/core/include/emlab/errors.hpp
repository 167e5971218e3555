#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace emlab {

// Base class for everything thrown by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent configuration (dimension mismatches, bad masks,
// missing fields, grid margin violations).  The CLI maps this to exit code 2.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
    // Dotted path of the offending config field, when known ("params.gamma").
    std::string field_path;
    ConfigError(const std::string& path, const std::string& msg)
        : Error(path + ": " + msg), field_path(path) {}
};

// Explicit time step rejected by a stability bound.
struct StabilityError : Error {
    StabilityError(const std::string& msg, double suggested)
        : Error(msg), suggested_dt(suggested) {}
    double suggested_dt;
};

// Density hit the positivity floor (a node) where a nodeless field is required.
struct NodeError : Error {
    explicit NodeError(const std::string& msg) : Error(msg) {}
};

// Input outside the mathematical domain of an operation.
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Least-squares system does not identify all requested components.
struct RankDeficientError : Error {
    RankDeficientError(const std::string& msg, std::vector<std::string> comps)
        : Error(msg), components(std::move(comps)) {}
    std::vector<std::string> components;
};

// Non-finite values or failed linear solves.
struct NumericError : Error {
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

}  // namespace emlab
