#include "deterrence/grids.hpp"

#include <algorithm>
#include <cmath>

namespace deterrence {

StateGrid StateGrid::uniform(double x_min, double x_max, int n_nodes) {
    StateGrid g;
    g.nodes.resize(n_nodes);
    for (int i = 0; i < n_nodes; ++i)
        g.nodes[i] = x_min + (x_max - x_min) * i / (n_nodes - 1);
    validate_state_grid(g);
    return g;
}

StateGrid StateGrid::log_uniform(double x_min, double x_max, int n_nodes) {
    if (x_min <= 0.0) throw DomainError("log-uniform grid requires x_min > 0");
    StateGrid g;
    g.nodes.resize(n_nodes);
    double l0 = std::log(x_min), l1 = std::log(x_max);
    for (int i = 0; i < n_nodes; ++i)
        g.nodes[i] = std::exp(l0 + (l1 - l0) * i / (n_nodes - 1));
    validate_state_grid(g);
    return g;
}

int StateGrid::nearest(double x) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), x);
    if (it == nodes.begin()) return 0;
    if (it == nodes.end()) return n_nodes() - 1;
    int hi = static_cast<int>(it - nodes.begin());
    return (x - nodes[hi - 1] <= nodes[hi] - x) ? hi - 1 : hi;
}

ControlGrid ControlGrid::uniform(double u_min, double u_max, int n_levels) {
    ControlGrid g;
    if (n_levels == 1) {
        g.levels = {u_min};
    } else {
        g.levels.resize(n_levels);
        for (int i = 0; i < n_levels; ++i)
            g.levels[i] = u_min + (u_max - u_min) * i / (n_levels - 1);
    }
    validate_control_grid(g);
    return g;
}

void validate_state_grid(const StateGrid& g) {
    if (g.n_nodes() < 3) throw DomainError("state grid needs at least 3 nodes");
    if (g.nodes.front() < 0.0) throw DomainError("state grid requires x_min >= 0");
    for (int i = 0; i + 1 < g.n_nodes(); ++i)
        if (!(g.nodes[i] < g.nodes[i + 1]))
            throw DomainError("state grid nodes must be strictly increasing");
}

void validate_control_grid(const ControlGrid& g) {
    if (g.levels.empty()) throw DomainError("control grid must be nonempty");
    if (g.levels.front() < 0.0) throw DomainError("control grid requires u_min >= 0");
    for (int i = 0; i + 1 < g.n_levels(); ++i)
        if (!(g.levels[i] < g.levels[i + 1]))
            throw DomainError("control levels must be strictly increasing");
}

FeedbackPolicy FeedbackPolicy::constant(const TimeGrid& tg, const StateGrid& sg, double u) {
    FeedbackPolicy p;
    p.time_grid = tg;
    p.state_grid = sg;
    p.controls.assign(static_cast<std::size_t>(tg.n_steps + 1) * sg.n_nodes(), u);
    return p;
}

double FeedbackPolicy::eval(int t_idx, double x) const {
    int ti = std::clamp(t_idx, 0, time_grid.n_steps);
    return at(ti, state_grid.nearest(x));
}

bool same_grids(const ValueSurface& a, const ValueSurface& b) {
    return a.time_grid.n_steps == b.time_grid.n_steps &&
           a.time_grid.horizon == b.time_grid.horizon &&
           a.state_grid.nodes == b.state_grid.nodes;
}

} // namespace deterrence
