#include "deterrence/pic.hpp"

#include <cmath>
#include <limits>

namespace deterrence {

double lagrangian_increment(double x, double x_next, double u, double dt,
                            double running_reward, const CklsParams& p) {
    if (!(dt > 0.0)) throw DomainError("lagrangian_increment requires dt > 0");
    double mu = drift(x, u, 0.0, p);
    double dev = x_next - x - mu * dt;
    double sig = diffusion(x, p);
    if (sig <= 0.0) {
        // Deterministic branch: infinite penalty off the drift step.
        if (std::abs(dev) <= 1e-12 * std::max(1.0, std::abs(x)))
            return -running_reward * dt;
        return std::numeric_limits<double>::infinity();
    }
    return dev * dev / (2.0 * sig * sig * dt) - running_reward * dt;
}

double euclidean_action(const std::vector<double>& path,
                        const std::vector<double>& controls, const TimeGrid& grid,
                        const MarketPrimitives& m, const CklsParams& p) {
    const int n = grid.n_steps;
    if (static_cast<int>(path.size()) != n + 1)
        throw GridMismatchError("path length must be n_steps + 1");
    if (static_cast<int>(controls.size()) != n)
        throw GridMismatchError("controls length must be n_steps");
    double action = 0.0;
    for (int k = 0; k < n; ++k) {
        double reward = std::exp(-m.gamma * grid.time(k)) *
                        (m.q - controls[k]) * path[k];
        action += lagrangian_increment(path[k], path[k + 1], controls[k],
                                       grid.dt(), reward, p);
    }
    return action;
}

namespace {

inline double normal_cdf(double t) { return 0.5 * std::erfc(-t * 0.70710678118654752440); }

} // namespace

std::vector<double> kernel_weights(double mean, double stddev, const StateGrid& grid) {
    const int n = grid.n_nodes();
    std::vector<double> w(n, 0.0);
    if (stddev <= 0.0) {
        w[grid.nearest(mean)] = 1.0;
        return w;
    }
    // Cells around each node, edges at midpoints; outer edges at +-infinity
    // so boundary nodes absorb the tail mass.
    double prev_cdf = 0.0;
    for (int j = 0; j < n; ++j) {
        double upper;
        if (j == n - 1) {
            upper = 1.0;
        } else {
            double edge = 0.5 * (grid.nodes[j] + grid.nodes[j + 1]);
            upper = normal_cdf((edge - mean) / stddev);
        }
        w[j] = upper - prev_cdf;
        prev_cdf = upper;
    }
    return w;
}

SolveResult backward_value(const ControlProblem& prob) {
    validate_grid(prob.time_grid);
    validate_state_grid(prob.state_grid);
    validate_control_grid(prob.control_grid);
    const int n_steps = prob.time_grid.n_steps;
    const int n_nodes = prob.state_grid.n_nodes();
    const int n_ctrl = prob.control_grid.n_levels();
    const double dt = prob.time_grid.dt();
    const double disc = std::exp(-prob.gamma * dt);
    if (static_cast<int>(prob.terminal.size()) != n_nodes)
        throw GridMismatchError("terminal length != state nodes");

    // Kernel-resolution precondition at interior nodes with positive noise.
    for (int i = 1; i + 1 < n_nodes; ++i) {
        double sig = prob.sigma(prob.state_grid.nodes[i]);
        if (sig <= 0.0) continue;
        double h = std::max(prob.state_grid.spacing(i - 1), prob.state_grid.spacing(i));
        if (sig * std::sqrt(dt) < 0.5 * h)
            throw ResolutionError("kernel std below half the node spacing; refine the state grid");
    }

    SolveResult out;
    out.value.time_grid = prob.time_grid;
    out.value.state_grid = prob.state_grid;
    out.value.values.assign(static_cast<std::size_t>(n_steps + 1) * n_nodes, 0.0);
    out.policy.time_grid = prob.time_grid;
    out.policy.state_grid = prob.state_grid;
    out.policy.controls.assign(static_cast<std::size_t>(n_steps + 1) * n_nodes,
                               prob.control_grid.levels.front());

    for (int i = 0; i < n_nodes; ++i) out.value.at(n_steps, i) = prob.terminal[i];

    std::vector<double> next(n_nodes);
    for (int k = n_steps - 1; k >= 0; --k) {
        for (int i = 0; i < n_nodes; ++i) next[i] = out.value.at(k + 1, i);
        for (int i = 0; i < n_nodes; ++i) {
            if (prob.absorbed && prob.absorbed(k, i)) {
                out.value.at(k, i) = prob.absorbed_value(k, i);
                continue;
            }
            double x = prob.state_grid.nodes[i];
            double sig = prob.sigma(x);
            double best = -std::numeric_limits<double>::infinity();
            double best_u = prob.control_grid.levels.front();
            for (int c = 0; c < n_ctrl; ++c) {
                double u = prob.control_grid.levels[c];
                double mean = x + prob.drift(k, x, u) * dt;
                auto w = kernel_weights(mean, sig * std::sqrt(dt), prob.state_grid);
                double ev = 0.0;
                for (int j = 0; j < n_nodes; ++j) ev += w[j] * next[j];
                double val = prob.reward(k, x, u) * dt + disc * ev;
                if (val > best) {
                    best = val;
                    best_u = u;
                }
            }
            out.value.at(k, i) = best;
            out.policy.at(k, i) = best_u;
        }
    }
    return out;
}

SolveResult backward_value(const TimeGrid& tg, const StateGrid& sg,
                           const std::vector<double>& terminal,
                           const std::function<double(double, double)>& running_reward,
                           const ControlGrid& cg, const MarketPrimitives& m,
                           const CklsParams& p) {
    ControlProblem prob;
    prob.time_grid = tg;
    prob.state_grid = sg;
    prob.control_grid = cg;
    prob.terminal = terminal;
    prob.gamma = m.gamma;
    prob.reward = [running_reward](int, double x, double u) { return running_reward(x, u); };
    prob.drift = [p](int, double x, double u) { return drift(x, u, 0.0, p); };
    prob.sigma = [p](double x) { return diffusion(x, p); };
    return backward_value(prob);
}

ControlProblem incumbent_problem(const MarketPrimitives& m, const CklsParams& p,
                                 const TimeGrid& tg, const StateGrid& sg,
                                 const ControlGrid& cg, const StoppingRule& entrant_rule,
                                 double epsilon) {
    ControlProblem prob;
    prob.time_grid = tg;
    prob.state_grid = sg;
    prob.control_grid = cg;
    prob.gamma = m.gamma;
    prob.reward = [m, epsilon](int, double x, double u) {
        return (m.q - u) * x - epsilon * u * u * x;
    };
    prob.drift = [p](int, double x, double u) { return drift(x, u, 0.0, p); };
    prob.sigma = [p](double x) { return diffusion(x, p); };
    prob.terminal.resize(sg.n_nodes());
    for (int i = 0; i < sg.n_nodes(); ++i)
        prob.terminal[i] = continuation_value(sg.nodes[i], 0.0, 0.0, m.d_i_w, p, m.gamma);
    prob.absorbed = [entrant_rule, sg](int k, int node) {
        return entrant_rule.triggered(k, sg.nodes[node]);
    };
    prob.absorbed_value = [m, p, sg](int, int node) {
        return continuation_value(sg.nodes[node], 0.0, 0.0, m.d_i_w, p, m.gamma);
    };
    return prob;
}

SolveResult solve_incumbent(const MarketPrimitives& m, const CklsParams& p,
                            const TimeGrid& tg, const StateGrid& sg,
                            const ControlGrid& cg, const StoppingRule& entrant_rule,
                            double epsilon) {
    return backward_value(incumbent_problem(m, p, tg, sg, cg, entrant_rule, epsilon));
}

} // namespace deterrence
