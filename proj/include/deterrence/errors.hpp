#pragma once

#include <stdexcept>
#include <string>

namespace deterrence {

/// Invalid parameter, grid, or configuration value.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Discounted continuation value is infinite (drift >= discount rate).
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Transition kernel cannot be resolved on the state grid.
class ResolutionError : public std::runtime_error {
public:
    explicit ResolutionError(const std::string& what) : std::runtime_error(what) {}
};

/// Explicit time stepping violates the diffusion CFL bound.
class CflError : public std::runtime_error {
public:
    explicit CflError(const std::string& what) : std::runtime_error(what) {}
};

/// Fixed-point iteration failed to reach the requested tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual(residual), iterations(iterations) {}
    double residual;
    int iterations;
};

/// Two surfaces defined on different grids were combined.
class GridMismatchError : public std::runtime_error {
public:
    explicit GridMismatchError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace deterrence
