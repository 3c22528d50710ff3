#pragma once

#include <cstdint>
#include <vector>

#include "deterrence/errors.hpp"

namespace deterrence {

/// Coefficients of the controlled CKLS demand process
///   dX = (alpha1 + alpha2*X + theta1*u1 + theta2*u2) ds + alpha3*X^alpha4 dB.
struct CklsParams {
    double alpha1 = 0.0; ///< baseline drift
    double alpha2 = 0.0; ///< mean-reversion / growth rate
    double alpha3 = 0.0; ///< volatility scale, >= 0
    double alpha4 = 0.5; ///< volatility exponent, in [0.5, 1.5]
    double theta1 = 0.0; ///< incumbent control drift coupling
    double theta2 = 0.0; ///< entrant control drift coupling
};

/// Uniform partition of [0, horizon] into n_steps subintervals.
struct TimeGrid {
    double horizon = 1.0;
    int n_steps = 1;

    double dt() const { return horizon / n_steps; }
    double time(int step) const { return step * dt(); }
};

/// Throws DomainError naming the offending field; returns p unchanged otherwise.
CklsParams validate_params(const CklsParams& p);

/// Throws DomainError on non-positive horizon or n_steps < 1.
TimeGrid validate_grid(const TimeGrid& g);

/// Uniform partition of [0, t] into n subintervals; returns the node times.
TimeGrid build_partition(double t, int n);

inline double drift(double x, double u1, double u2, const CklsParams& p) {
    return p.alpha1 + p.alpha2 * x + p.theta1 * u1 + p.theta2 * u2;
}

/// alpha3 * x^alpha4; vanishes at x = 0.
double diffusion(double x, const CklsParams& p);

/// Full-truncation Euler step: state clamped to 0 inside the coefficients
/// and after the update.
double step_euler(double x, double u1, double u2, double dt, double noise,
                  const CklsParams& p);

/// Simulated trajectories with the controls applied at each step.
/// states is (n_paths) x (n_steps+1); controls are (n_paths) x (n_steps).
struct PathEnsemble {
    std::vector<double> times;
    int n_paths = 0;
    int n_steps = 0;
    std::vector<double> states;      // row-major n_paths x (n_steps+1)
    std::vector<double> controls_u1; // row-major n_paths x n_steps
    std::vector<double> controls_u2;
    std::uint64_t seed = 0;

    double state(int path, int step) const {
        return states[static_cast<std::size_t>(path) * (n_steps + 1) + step];
    }
    double u1(int path, int step) const {
        return controls_u1[static_cast<std::size_t>(path) * n_steps + step];
    }
    double u2(int path, int step) const {
        return controls_u2[static_cast<std::size_t>(path) * n_steps + step];
    }
};

} // namespace deterrence
