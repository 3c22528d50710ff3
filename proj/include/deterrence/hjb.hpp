#pragma once

#include "deterrence/pic.hpp"

namespace deterrence {

/// Finite-difference configuration. First derivatives are upwinded on the
/// drift sign (one-sided at the boundary nodes); the second derivative is
/// central and dropped at the boundaries.
struct FdScheme {
    enum class TimeStepping { Explicit, Implicit };
    TimeStepping time_stepping = TimeStepping::Implicit;
    double cfl_safety = 1.0; ///< in (0, 1]; explicit stepping only
};

/// Independent finite-difference solver for the same discounted control
/// problems as backward_value; serves as its cross-validation oracle.
/// Explicit stepping throws CflError when dt > cfl_safety * h^2 / max sigma^2.
SolveResult solve_hjb_fd(const ControlProblem& prob, const FdScheme& scheme);

struct CrossValidationReport {
    double value_gap = 0.0;         ///< sup-norm gap / sup-norm scale
    double policy_agreement = 1.0;  ///< fraction of nodes with identical argmax
    double tol_value = 0.0;
    double tol_policy_agreement = 0.0;
    bool pass = false;
};

/// Compares two solver outputs on identical grids. Throws GridMismatchError
/// when grids differ.
CrossValidationReport cross_validate(const SolveResult& pic, const SolveResult& hjb,
                                     double tol_value, double tol_policy_agreement);

} // namespace deterrence
