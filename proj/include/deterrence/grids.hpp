#pragma once

#include <vector>

#include "deterrence/errors.hpp"
#include "deterrence/model.hpp"

namespace deterrence {

/// Strictly increasing state nodes, x_min >= 0. Uniform or log-uniform.
struct StateGrid {
    std::vector<double> nodes;

    static StateGrid uniform(double x_min, double x_max, int n_nodes);
    static StateGrid log_uniform(double x_min, double x_max, int n_nodes);

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    double spacing(int i) const { return nodes[i + 1] - nodes[i]; }

    /// Index of the node nearest to x (clamped to the grid range).
    int nearest(double x) const;
};

/// Finite set of admissible control levels, increasing, u_min >= 0.
struct ControlGrid {
    std::vector<double> levels;

    static ControlGrid uniform(double u_min, double u_max, int n_levels);
    int n_levels() const { return static_cast<int>(levels.size()); }
};

void validate_state_grid(const StateGrid& g);
void validate_control_grid(const ControlGrid& g);

/// Discounted value-to-go on a (time x state) grid, row-major in time.
struct ValueSurface {
    TimeGrid time_grid;
    StateGrid state_grid;
    std::vector<double> values; // (n_steps+1) x n_nodes

    double& at(int t_idx, int s_idx) {
        return values[static_cast<std::size_t>(t_idx) * state_grid.n_nodes() + s_idx];
    }
    double at(int t_idx, int s_idx) const {
        return values[static_cast<std::size_t>(t_idx) * state_grid.n_nodes() + s_idx];
    }
};

/// Closed-loop control u(s, x) on a (time x state) grid. Off-grid queries
/// clamp to the nearest node in both time and state.
struct FeedbackPolicy {
    TimeGrid time_grid;
    StateGrid state_grid;
    std::vector<double> controls; // (n_steps+1) x n_nodes

    static FeedbackPolicy constant(const TimeGrid& tg, const StateGrid& sg, double u);

    double& at(int t_idx, int s_idx) {
        return controls[static_cast<std::size_t>(t_idx) * state_grid.n_nodes() + s_idx];
    }
    double at(int t_idx, int s_idx) const {
        return controls[static_cast<std::size_t>(t_idx) * state_grid.n_nodes() + s_idx];
    }

    /// Control at (time step index, state), nearest-node clamped.
    double eval(int t_idx, double x) const;
};

bool same_grids(const ValueSurface& a, const ValueSurface& b);

} // namespace deterrence
