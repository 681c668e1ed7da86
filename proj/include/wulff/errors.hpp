#pragma once

#include <stdexcept>
#include <string>

namespace wulff {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// gamma fails A_gamma > 0 somewhere (non-admissible anisotropy).
struct AdmissibilityError : Error {
    int worst_node = -1;
    double worst_eig = 0.0;
    AdmissibilityError(const std::string& msg, int node, double eig)
        : Error(msg), worst_node(node), worst_eig(eig) {}
};

struct PositivityError : Error {
    using Error::Error;
};

/// radii matrix not positive definite (body not strictly convex).
struct ConvexityError : Error {
    int worst_node = -1;
    double min_eig = 0.0;
    ConvexityError(const std::string& msg, int node, double eig)
        : Error(msg), worst_node(node), min_eig(eig) {}
};

struct QUnavailableError : Error {
    using Error::Error;
};

struct StepCollapseError : Error {
    using Error::Error;
};

struct IllConditionedFitError : Error {
    double condition = 0.0;
    IllConditionedFitError(const std::string& msg, double cond)
        : Error(msg), condition(cond) {}
};

struct InsufficientDataError : Error {
    using Error::Error;
};

struct MissingRunError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct UnsupportedError : Error {
    using Error::Error;
};

}  // namespace wulff
