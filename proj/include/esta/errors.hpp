#pragma once

#include <stdexcept>
#include <string>

namespace esta {

// Invalid argument or precondition violation (bad t range, wrong vector
// dimension, non-positive physical constant, ...). CLI exit code 1/3.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// A numerical routine could not reach its accuracy contract (quadrature
// refinement exhausted, step-halving discrepancy, ...). CLI exit code 2.
class AccuracyError : public std::runtime_error {
public:
    explicit AccuracyError(const std::string& what) : std::runtime_error(what) {}
};

// Iterative solver ran out of iterations. CLI exit code 2.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Spatial grid cannot represent the state (momentum aliasing detected,
// span too small). CLI exit code 2.
class GridError : public std::runtime_error {
public:
    explicit GridError(const std::string& what) : std::runtime_error(what) {}
};

// Configuration file / flag problem; message names the offending key.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace esta
