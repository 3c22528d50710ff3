#pragma once

#include <functional>
#include <vector>

#include "deterrence/grids.hpp"
#include "deterrence/model.hpp"
#include "deterrence/payoffs.hpp"
#include "deterrence/stopping.hpp"

namespace deterrence {

/// One Onsager-Machlup action increment over a subinterval of length dt:
///   (x_next - x - drift*dt)^2 / (2 sigma(x)^2 dt) - running_reward * dt.
/// The control u enters the drift through the incumbent coupling theta1.
/// At sigma(x) = 0 the deterministic branch applies: -running_reward*dt on
/// the drift step, +infinity off it.
double lagrangian_increment(double x, double x_next, double u, double dt,
                            double running_reward, const CklsParams& p);

/// Euclidean action of a discretized path under the signaling reward
/// (q - u) x, rewards discounted by exp(-gamma s) at the left endpoints.
/// path has grid.n_steps + 1 states; controls has grid.n_steps entries.
double euclidean_action(const std::vector<double>& path,
                        const std::vector<double>& controls, const TimeGrid& grid,
                        const MarketPrimitives& m, const CklsParams& p);

/// Transition probabilities onto the state grid for a Gaussian step with the
/// given mean and standard deviation. Cell-edge integration: mass outside
/// the grid accrues to the nearest boundary node; weights sum to 1 exactly.
/// std = 0 degenerates to a point mass at the nearest node.
std::vector<double> kernel_weights(double mean, double stddev, const StateGrid& grid);

/// A single-agent discounted control problem on the (time x state) grid.
/// Absorbing nodes (absorbed != null, true) freeze the value at
/// absorbed_value and carry the smallest admissible control.
struct ControlProblem {
    TimeGrid time_grid;
    StateGrid state_grid;
    ControlGrid control_grid;
    std::vector<double> terminal; // over state nodes
    double gamma = 1.0;
    std::function<double(int t_idx, double x, double u)> reward;
    std::function<double(int t_idx, double x, double u)> drift;
    std::function<double(double x)> sigma;
    std::function<bool(int t_idx, int node)> absorbed;        // optional
    std::function<double(int t_idx, int node)> absorbed_value; // optional
};

struct SolveResult {
    ValueSurface value;
    FeedbackPolicy policy;
};

/// Backward value propagation with the Gaussian Euler transition kernel:
///   V(s,x) = max_u { reward(x,u) dt + exp(-gamma dt) E[V(s+dt, X')] },
/// ties broken toward the smallest control. Throws ResolutionError when the
/// kernel std falls below half the node spacing at an interior node with
/// positive diffusion.
SolveResult backward_value(const ControlProblem& prob);

/// Convenience wrapper: reward(x, u) independent of time, model drift with
/// the control in the incumbent slot, CKLS diffusion.
SolveResult backward_value(const TimeGrid& tg, const StateGrid& sg,
                           const std::vector<double>& terminal,
                           const std::function<double(double, double)>& running_reward,
                           const ControlGrid& cg, const MarketPrimitives& m,
                           const CklsParams& p);

/// Incumbent signaling problem: flow (q - u) x - epsilon u^2 x while the
/// entrant stays out, absorption into the duopoly continuation where
/// entrant_rule triggers, duopoly continuation terminal.
ControlProblem incumbent_problem(const MarketPrimitives& m, const CklsParams& p,
                                 const TimeGrid& tg, const StateGrid& sg,
                                 const ControlGrid& cg, const StoppingRule& entrant_rule,
                                 double epsilon = 0.0);

SolveResult solve_incumbent(const MarketPrimitives& m, const CklsParams& p,
                            const TimeGrid& tg, const StateGrid& sg,
                            const ControlGrid& cg, const StoppingRule& entrant_rule,
                            double epsilon = 0.0);

} // namespace deterrence
