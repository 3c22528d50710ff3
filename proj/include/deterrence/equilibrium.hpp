#pragma once

#include <cstdint>

#include "deterrence/beliefs.hpp"
#include "deterrence/hjb.hpp"
#include "deterrence/pic.hpp"

namespace deterrence {

struct EntrantResponse {
    StoppingRule entry_rule;            // threshold-above per time node
    FeedbackPolicy post_entry_policy;   // u2 after entry (flow-form solve)
    ValueSurface entry_value;           // pre-entry stopping value
    bool threshold_structure = true;    // false when a stopping set was not an up-set
};

struct IncumbentResponse {
    FeedbackPolicy policy;              // signaling control u1
    StoppingRule revelation_rule;       // threshold-below per time node
    ValueSurface value;
    bool threshold_structure = true;
};

struct EquilibriumDiagnostics {
    double entry_prob = 0.0;
    double mean_entry_time = 0.0;       // conditional on entry; 0 when no path enters
    double revelation_prob = 0.0;
    double incumbent_payoff = 0.0;
    double entrant_payoff = 0.0;        // vs the weak type, flow form
};

struct EquilibriumSolution {
    FeedbackPolicy incumbent_policy;
    StoppingRule revelation_rule;
    StoppingRule entrant_entry_rule;
    FeedbackPolicy entrant_post_entry_policy;
    double residual = 0.0;
    int iterations = 0;
    EquilibriumDiagnostics diagnostics;
};

struct EquilibriumOptions {
    int max_iter = 50;
    double tol = 1e-6;
    double damping = 1.0;      // mixes successive thresholds
    double epsilon = 0.0;      // quadratic control regularization
    double hazard = 0.0;       // revelation mixing intensity
    int n_paths = 20000;       // diagnostics ensemble size
    std::uint64_t seed = 42;
    int threads = 0;
};

/// Entrant best response to the incumbent's signaling policy and revelation
/// rule: optimal stopping on the grid with the lump-sum termination value
/// weighted by the posterior probability of the weak type, plus the
/// post-entry control from the flow-form backward solve.
EntrantResponse entrant_best_response(const FeedbackPolicy& incumbent_policy,
                                      const StoppingRule& revelation_rule,
                                      const MarketPrimitives& m, const CklsParams& p,
                                      const TimeGrid& tg, const StateGrid& sg,
                                      const ControlGrid& cg, double x0);

/// Weak incumbent best response to the entrant's entry rule: joint
/// control-and-stopping solve with a reveal action at each node. Reveals
/// where the post-revelation regime value weakly dominates the signaling
/// continuation (ties reveal).
IncumbentResponse incumbent_best_response(const StoppingRule& entry_rule,
                                          const MarketPrimitives& m,
                                          const CklsParams& p, const TimeGrid& tg,
                                          const StateGrid& sg, const ControlGrid& cg,
                                          double epsilon = 0.0);

/// Damped best-response iteration from the no-entry initialization.
/// Throws ConvergenceError (carrying the last residual) past max_iter.
EquilibriumSolution solve_equilibrium(const MarketPrimitives& m, const CklsParams& p,
                                      const TimeGrid& tg, const StateGrid& sg,
                                      const ControlGrid& cg, double x0,
                                      const EquilibriumOptions& opts = {});

} // namespace deterrence
