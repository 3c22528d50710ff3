#pragma once

#include <cstdint>
#include <vector>

#include "deterrence/grids.hpp"
#include "deterrence/model.hpp"

namespace deterrence {

/// Threshold stopping rule on the time grid. threshold[k] is the barrier at
/// time node k; kind decides the crossing direction. hazard > 0 turns the
/// pure rule into a mixed one: once the barrier condition holds, stopping
/// occurs per step with probability 1 - exp(-hazard * dt).
struct StoppingRule {
    enum class Kind { ThresholdAbove, ThresholdBelow, Never };

    Kind kind = Kind::Never;
    std::vector<double> threshold; // one entry per time node (n_steps + 1)
    double hazard = 0.0;

    static StoppingRule never() { return StoppingRule{}; }
    static StoppingRule above(std::vector<double> thr, double hazard = 0.0);
    static StoppingRule below(std::vector<double> thr, double hazard = 0.0);
    static StoppingRule above_const(double thr, int n_nodes, double hazard = 0.0);
    static StoppingRule below_const(double thr, int n_nodes, double hazard = 0.0);

    /// True when the barrier condition holds at (time node k, state x).
    bool triggered(int k, double x) const;
};

/// Returns the same rule with the given mixing hazard. Throws DomainError
/// unless the rule is threshold-below (mixing is defined for revelation).
StoppingRule apply_mixing(const StoppingRule& rule, double hazard);

/// First stopping step of `rule` on one simulated path, or n_steps + 1 when
/// the path never stops. Mixing randomness is drawn from (seed, path, tag)
/// so results are reproducible and independent of other consumers.
int first_stop_step(const StoppingRule& rule, const PathEnsemble& ens, int path,
                    double dt, std::uint64_t seed, std::uint64_t tag);

} // namespace deterrence
