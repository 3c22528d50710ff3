#include "deterrence/hjb.hpp"

#include <cmath>
#include <limits>

namespace deterrence {

namespace {

// Upwind first derivative; inward one-sided at the boundaries, dropped when
// the drift points out of the domain (outflow).
double upwind_dx(const std::vector<double>& v, const StateGrid& g, int i, double mu) {
    const int n = g.n_nodes();
    if (mu >= 0.0) {
        if (i == n - 1) return 0.0;
        return (v[i + 1] - v[i]) / g.spacing(i);
    }
    if (i == 0) return 0.0;
    return (v[i] - v[i - 1]) / g.spacing(i - 1);
}

// Central second derivative; zero at the boundary nodes.
double central_dxx(const std::vector<double>& v, const StateGrid& g, int i) {
    const int n = g.n_nodes();
    if (i == 0 || i == n - 1) return 0.0;
    double hl = g.spacing(i - 1), hr = g.spacing(i);
    return 2.0 / (hl + hr) * ((v[i + 1] - v[i]) / hr - (v[i] - v[i - 1]) / hl);
}

// Thomas solve of a tridiagonal system; diag/sub/super are overwritten.
void thomas_solve(std::vector<double>& sub, std::vector<double>& diag,
                  std::vector<double>& super, std::vector<double>& rhs) {
    const int n = static_cast<int>(diag.size());
    for (int i = 1; i < n; ++i) {
        if (diag[i - 1] == 0.0)
            throw DomainError("singular tridiagonal system in implicit HJB step");
        double w = sub[i] / diag[i - 1];
        diag[i] -= w * super[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    if (diag[n - 1] == 0.0)
        throw DomainError("singular tridiagonal system in implicit HJB step");
    rhs[n - 1] /= diag[n - 1];
    for (int i = n - 2; i >= 0; --i)
        rhs[i] = (rhs[i] - super[i] * rhs[i + 1]) / diag[i];
}

} // namespace

SolveResult solve_hjb_fd(const ControlProblem& prob, const FdScheme& scheme) {
    validate_grid(prob.time_grid);
    validate_state_grid(prob.state_grid);
    validate_control_grid(prob.control_grid);
    const int n_steps = prob.time_grid.n_steps;
    const int n_nodes = prob.state_grid.n_nodes();
    const int n_ctrl = prob.control_grid.n_levels();
    const double dt = prob.time_grid.dt();
    const double disc = std::exp(-prob.gamma * dt);
    const StateGrid& sg = prob.state_grid;
    if (static_cast<int>(prob.terminal.size()) != n_nodes)
        throw GridMismatchError("terminal length != state nodes");

    const bool explicit_step = scheme.time_stepping == FdScheme::TimeStepping::Explicit;
    if (explicit_step) {
        if (!(scheme.cfl_safety > 0.0 && scheme.cfl_safety <= 1.0))
            throw DomainError("cfl_safety must lie in (0, 1]");
        double h_min = std::numeric_limits<double>::infinity();
        for (int i = 0; i + 1 < n_nodes; ++i) h_min = std::min(h_min, sg.spacing(i));
        double sig2_max = 0.0;
        for (int i = 0; i < n_nodes; ++i) {
            double s = prob.sigma(sg.nodes[i]);
            sig2_max = std::max(sig2_max, s * s);
        }
        if (sig2_max > 0.0 && dt > scheme.cfl_safety * h_min * h_min / sig2_max)
            throw CflError("explicit HJB step violates the diffusion CFL bound");
    }

    SolveResult out;
    out.value.time_grid = prob.time_grid;
    out.value.state_grid = sg;
    out.value.values.assign(static_cast<std::size_t>(n_steps + 1) * n_nodes, 0.0);
    out.policy.time_grid = prob.time_grid;
    out.policy.state_grid = sg;
    out.policy.controls.assign(static_cast<std::size_t>(n_steps + 1) * n_nodes,
                               prob.control_grid.levels.front());
    for (int i = 0; i < n_nodes; ++i) out.value.at(n_steps, i) = prob.terminal[i];

    std::vector<double> next(n_nodes), cur(n_nodes);
    std::vector<double> sub(n_nodes), diag(n_nodes), super(n_nodes), rhs(n_nodes);
    std::vector<double> u_star(n_nodes), mu_star(n_nodes), r_star(n_nodes);

    for (int k = n_steps - 1; k >= 0; --k) {
        for (int i = 0; i < n_nodes; ++i) next[i] = out.value.at(k + 1, i);

        // Control selection on the known slice (policy-explicit).
        for (int i = 0; i < n_nodes; ++i) {
            double x = sg.nodes[i];
            double sig = prob.sigma(x);
            double dxx = central_dxx(next, sg, i);
            double best = -std::numeric_limits<double>::infinity();
            double best_u = prob.control_grid.levels.front();
            double best_mu = 0.0, best_r = 0.0;
            for (int c = 0; c < n_ctrl; ++c) {
                double u = prob.control_grid.levels[c];
                double mu = prob.drift(k, x, u);
                double r = prob.reward(k, x, u);
                double val = r + mu * upwind_dx(next, sg, i, mu) + 0.5 * sig * sig * dxx;
                if (val > best) {
                    best = val;
                    best_u = u;
                    best_mu = mu;
                    best_r = r;
                }
            }
            u_star[i] = best_u;
            mu_star[i] = best_mu;
            r_star[i] = best_r;
        }

        if (explicit_step) {
            for (int i = 0; i < n_nodes; ++i) {
                double x = sg.nodes[i];
                double sig = prob.sigma(x);
                double lv = mu_star[i] * upwind_dx(next, sg, i, mu_star[i]) +
                            0.5 * sig * sig * central_dxx(next, sg, i);
                // left-endpoint reward quadrature (same convention as the
                // kernel solver), exact discounting of the continuation
                cur[i] = dt * r_star[i] + disc * (next[i] + dt * lv);
            }
        } else {
            // (I - dt A) v = next + dt r, then exact per-step discounting.
            for (int i = 0; i < n_nodes; ++i) {
                double x = sg.nodes[i];
                double sig = prob.sigma(x);
                double a_sub = 0.0, a_diag = 0.0, a_super = 0.0;
                if (i > 0 && i < n_nodes - 1) {
                    double hl = sg.spacing(i - 1), hr = sg.spacing(i);
                    double c = sig * sig / (hl + hr);
                    a_sub += c / hl;
                    a_super += c / hr;
                    a_diag -= c / hl + c / hr;
                }
                double mu = mu_star[i];
                if (mu >= 0.0) {
                    if (i < n_nodes - 1) {
                        a_super += mu / sg.spacing(i);
                        a_diag -= mu / sg.spacing(i);
                    }
                } else {
                    if (i > 0) {
                        a_sub += -mu / sg.spacing(i - 1);
                        a_diag -= -mu / sg.spacing(i - 1);
                    }
                }
                sub[i] = -dt * a_sub;
                diag[i] = 1.0 - dt * a_diag;
                super[i] = -dt * a_super;
                rhs[i] = next[i];
            }
            thomas_solve(sub, diag, super, rhs);
            for (int i = 0; i < n_nodes; ++i)
                cur[i] = dt * r_star[i] + disc * rhs[i];
        }

        for (int i = 0; i < n_nodes; ++i) {
            if (prob.absorbed && prob.absorbed(k, i)) {
                out.value.at(k, i) = prob.absorbed_value(k, i);
                out.policy.at(k, i) = prob.control_grid.levels.front();
            } else {
                out.value.at(k, i) = cur[i];
                out.policy.at(k, i) = u_star[i];
            }
        }
    }
    return out;
}

CrossValidationReport cross_validate(const SolveResult& pic, const SolveResult& hjb,
                                     double tol_value, double tol_policy_agreement) {
    if (!same_grids(pic.value, hjb.value))
        throw GridMismatchError("cross_validate requires identical grids");

    double gap = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < pic.value.values.size(); ++i) {
        gap = std::max(gap, std::abs(pic.value.values[i] - hjb.value.values[i]));
        scale = std::max({scale, std::abs(pic.value.values[i]),
                          std::abs(hjb.value.values[i])});
    }
    double rel_gap = scale > 0.0 ? gap / scale : gap;

    std::size_t agree = 0;
    for (std::size_t i = 0; i < pic.policy.controls.size(); ++i)
        if (pic.policy.controls[i] == hjb.policy.controls[i]) ++agree;
    double agreement = static_cast<double>(agree) /
                       static_cast<double>(pic.policy.controls.size());

    CrossValidationReport rep;
    rep.value_gap = rel_gap;
    rep.policy_agreement = agreement;
    rep.tol_value = tol_value;
    rep.tol_policy_agreement = tol_policy_agreement;
    rep.pass = rel_gap <= tol_value && agreement >= tol_policy_agreement;
    return rep;
}

} // namespace deterrence
