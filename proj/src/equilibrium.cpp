#include "deterrence/equilibrium.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "deterrence/paths.hpp"

namespace deterrence {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Best lump-sum entry gain at (x, incumbent control u1): the entrant picks
// u2 from the control grid; levels with drift >= gamma are inadmissible.
double lump_gain(double x, double u1, const MarketPrimitives& m,
                 const CklsParams& p, const ControlGrid& cg) {
    double best = -kInf;
    for (double u2 : cg.levels) {
        if (drift(x, u1, u2, p) >= m.gamma) continue;
        double v = continuation_value(x, u1, u2, m.d_e_w - u2 * u2, p, m.gamma);
        best = std::max(best, v);
    }
    if (best == -kInf)
        throw DivergenceError("entry gain diverges: drift >= gamma for every control");
    return best;
}

// Posterior probability of the weak type at (x, u1), from the belief map
// anchored at (x0, logit(p0)). Falls back to the prior where the diffusion
// vanishes.
double weak_prob(double x, double x0, double u1, const MarketPrimitives& m,
                 const CklsParams& p) {
    if (diffusion(x, p) <= 0.0) return 1.0 - m.p0;
    double z = belief_update(x, x0, logit(m.p0), u1, 0.0, p);
    return 1.0 - posterior_prob(z);
}

struct StoppingSolve {
    std::vector<double> values;    // (n_steps+1) x n_nodes
    std::vector<char> stop;        // same layout
};

// Optimal stopping by backward value iteration: stop where the stop value
// weakly dominates the discounted kernel continuation. override, when set,
// replaces the Bellman comparison at a node (used for revelation events).
StoppingSolve stopping_value_iteration(
    const TimeGrid& tg, const StateGrid& sg, double gamma,
    const std::function<double(int, int)>& stop_value,
    const std::function<double(int, double)>& drift_fn,
    const std::function<double(double)>& sigma_fn,
    const std::function<std::optional<double>(int, int)>& override_fn) {
    const int n = tg.n_steps;
    const int nn = sg.n_nodes();
    const double dt = tg.dt();
    const double disc = std::exp(-gamma * dt);

    StoppingSolve out;
    out.values.assign(static_cast<std::size_t>(n + 1) * nn, 0.0);
    out.stop.assign(static_cast<std::size_t>(n + 1) * nn, 0);
    auto val = [&](int k, int i) -> double& {
        return out.values[static_cast<std::size_t>(k) * nn + i];
    };
    auto stp = [&](int k, int i) -> char& {
        return out.stop[static_cast<std::size_t>(k) * nn + i];
    };

    for (int i = 0; i < nn; ++i) {
        double sv = stop_value(n, i);
        val(n, i) = std::max(sv, 0.0);
        stp(n, i) = sv >= 0.0 ? 1 : 0;
    }
    for (int k = n - 1; k >= 0; --k) {
        for (int i = 0; i < nn; ++i) {
            if (override_fn) {
                if (auto ov = override_fn(k, i)) {
                    val(k, i) = *ov;
                    stp(k, i) = 0;
                    continue;
                }
            }
            double x = sg.nodes[i];
            double mean = x + drift_fn(k, x) * dt;
            auto w = kernel_weights(mean, sigma_fn(x) * std::sqrt(dt), sg);
            double cont = 0.0;
            for (int j = 0; j < nn; ++j) cont += w[j] * val(k + 1, j);
            cont *= disc;
            double sv = stop_value(k, i);
            if (sv >= cont) {
                val(k, i) = sv;
                stp(k, i) = 1;
            } else {
                val(k, i) = cont;
                stp(k, i) = 0;
            }
        }
    }
    return out;
}

// Up-crossing threshold per time node: the lowest node of the topmost
// contiguous stop suffix; +inf when nothing stops. structure_ok turns false
// when some stop set is not an up-set.
std::vector<double> extract_above_thresholds(const std::vector<char>& stop,
                                             const TimeGrid& tg, const StateGrid& sg,
                                             bool& structure_ok) {
    const int n = tg.n_steps, nn = sg.n_nodes();
    std::vector<double> thr(n + 1, kInf);
    for (int k = 0; k <= n; ++k) {
        const char* row = stop.data() + static_cast<std::size_t>(k) * nn;
        int first = nn;
        while (first > 0 && row[first - 1]) --first;
        if (first < nn) thr[k] = sg.nodes[first];
        for (int i = 0; i < first; ++i)
            if (row[i]) structure_ok = false;
    }
    return thr;
}

// Down-crossing threshold: highest node of the bottom contiguous stop
// prefix; -inf when nothing stops. mask marks nodes excluded from the
// structure check (entry-absorbed nodes).
std::vector<double> extract_below_thresholds(const std::vector<char>& stop,
                                             const std::vector<char>& excluded,
                                             const TimeGrid& tg, const StateGrid& sg,
                                             bool& structure_ok) {
    const int n = tg.n_steps, nn = sg.n_nodes();
    std::vector<double> thr(n + 1, -kInf);
    for (int k = 0; k <= n; ++k) {
        const char* row = stop.data() + static_cast<std::size_t>(k) * nn;
        const char* ex = excluded.data() + static_cast<std::size_t>(k) * nn;
        int last = -1;
        while (last + 1 < nn && row[last + 1]) ++last;
        if (last >= 0) thr[k] = sg.nodes[last];
        for (int i = last + 1; i < nn; ++i)
            if (row[i] && !ex[i]) structure_ok = false;
    }
    return thr;
}

// Entry rule of an entrant that knows the incumbent is weak and faces
// post-revelation incumbent control u1 = 0.
StoppingSolve known_weak_entry_solve(const MarketPrimitives& m, const CklsParams& p,
                                     const TimeGrid& tg, const StateGrid& sg,
                                     const ControlGrid& cg) {
    auto stop_value = [&](int, int i) {
        return lump_gain(sg.nodes[i], 0.0, m, p, cg) - m.f;
    };
    auto drift_fn = [&](int, double x) { return drift(x, 0.0, 0.0, p); };
    auto sigma_fn = [&](double x) { return diffusion(x, p); };
    return stopping_value_iteration(tg, sg, m.gamma, stop_value, drift_fn, sigma_fn,
                                    nullptr);
}

} // namespace

EntrantResponse entrant_best_response(const FeedbackPolicy& incumbent_policy,
                                      const StoppingRule& revelation_rule,
                                      const MarketPrimitives& m, const CklsParams& p,
                                      const TimeGrid& tg, const StateGrid& sg,
                                      const ControlGrid& cg, double x0) {
    const int nn = sg.n_nodes();

    // Post-entry control: flow-form backward solve against the observed
    // incumbent policy.
    ControlProblem post;
    post.time_grid = tg;
    post.state_grid = sg;
    post.control_grid = cg;
    post.gamma = m.gamma;
    post.terminal.assign(nn, 0.0);
    post.reward = [m](int, double x, double u2) { return (m.d_e_w - u2 * u2) * x; };
    post.drift = [&incumbent_policy, p](int k, double x, double u2) {
        return drift(x, incumbent_policy.eval(k, x), u2, p);
    };
    post.sigma = [p](double x) { return diffusion(x, p); };
    SolveResult post_solve = backward_value(post);

    // Value of entry when the type is already known to be weak (reached via
    // the incumbent's revelation).
    StoppingSolve known_weak = known_weak_entry_solve(m, p, tg, sg, cg);
    auto kw_val = [&](int k, int i) {
        return known_weak.values[static_cast<std::size_t>(k) * nn + i];
    };

    auto stop_value = [&](int k, int i) {
        double x = sg.nodes[i];
        double u1 = incumbent_policy.eval(k, x);
        return weak_prob(x, x0, u1, m, p) * lump_gain(x, u1, m, p, cg) - m.f;
    };
    auto drift_fn = [&](int k, double x) {
        return drift(x, incumbent_policy.eval(k, x), 0.0, p);
    };
    auto sigma_fn = [&](double x) { return diffusion(x, p); };
    // A revelation event resolves the type on the spot: weak with the
    // posterior weight (then the known-weak problem), nothing vs strong.
    auto override_fn = [&](int k, int i) -> std::optional<double> {
        double x = sg.nodes[i];
        if (!revelation_rule.triggered(k, x)) return std::nullopt;
        double u1 = incumbent_policy.eval(k, x);
        return weak_prob(x, x0, u1, m, p) * kw_val(k, i);
    };
    StoppingSolve pre = stopping_value_iteration(tg, sg, m.gamma, stop_value,
                                                 drift_fn, sigma_fn, override_fn);

    EntrantResponse out;
    out.post_entry_policy = post_solve.policy;
    out.entry_value.time_grid = tg;
    out.entry_value.state_grid = sg;
    out.entry_value.values = pre.values;
    bool ok = true;
    out.entry_rule = StoppingRule::above(
        extract_above_thresholds(pre.stop, tg, sg, ok));
    out.threshold_structure = ok;
    return out;
}

IncumbentResponse incumbent_best_response(const StoppingRule& entry_rule,
                                          const MarketPrimitives& m,
                                          const CklsParams& p, const TimeGrid& tg,
                                          const StateGrid& sg, const ControlGrid& cg,
                                          double epsilon) {
    const int n = tg.n_steps;
    const int nn = sg.n_nodes();
    const double dt = tg.dt();
    const double disc = std::exp(-m.gamma * dt);

    auto duopoly = [&](int i) {
        return continuation_value(sg.nodes[i], 0.0, 0.0, m.d_i_w, p, m.gamma);
    };

    // Post-revelation regime: the type is public, the entrant enters per its
    // known-weak rule, the incumbent collects the (M_w - u3_bar) flow until
    // entry and the duopoly continuation after.
    StoppingSolve kw = known_weak_entry_solve(m, p, tg, sg, cg);
    auto kw_stop = [&](int k, int i) {
        return kw.stop[static_cast<std::size_t>(k) * nn + i] != 0;
    };

    ControlProblem mono;
    mono.time_grid = tg;
    mono.state_grid = sg;
    mono.control_grid = ControlGrid{{0.0}};
    mono.gamma = m.gamma;
    mono.reward = [m](int, double x, double) { return (m.m_w - m.u3_bar) * x; };
    mono.drift = [p](int, double x, double) { return drift(x, 0.0, 0.0, p); };
    mono.sigma = [p](double x) { return diffusion(x, p); };
    mono.terminal.resize(nn);
    for (int i = 0; i < nn; ++i) mono.terminal[i] = duopoly(i);
    mono.absorbed = [kw_stop](int k, int i) { return kw_stop(k, i); };
    mono.absorbed_value = [duopoly](int, int i) { return duopoly(i); };
    SolveResult mono_solve = backward_value(mono);

    // Signaling phase with a reveal option at each node. Reveal first per
    // the Stackelberg order, then entry absorption, then the control step.
    IncumbentResponse out;
    out.value.time_grid = tg;
    out.value.state_grid = sg;
    out.value.values.assign(static_cast<std::size_t>(n + 1) * nn, 0.0);
    out.policy.time_grid = tg;
    out.policy.state_grid = sg;
    out.policy.controls.assign(static_cast<std::size_t>(n + 1) * nn,
                               cg.levels.front());
    std::vector<char> reveal(static_cast<std::size_t>(n + 1) * nn, 0);
    std::vector<char> entry_absorbed(static_cast<std::size_t>(n + 1) * nn, 0);

    for (int i = 0; i < nn; ++i) out.value.at(n, i) = duopoly(i);

    std::vector<double> next(nn);
    for (int k = n - 1; k >= 0; --k) {
        for (int i = 0; i < nn; ++i) next[i] = out.value.at(k + 1, i);
        for (int i = 0; i < nn; ++i) {
            double x = sg.nodes[i];
            double v_reveal = mono_solve.value.at(k, i);
            if (entry_rule.triggered(k, x)) {
                // The entrant moves at this demand level regardless of the
                // signal; revealing cannot help once entry is triggered.
                out.value.at(k, i) = duopoly(i);
                entry_absorbed[static_cast<std::size_t>(k) * nn + i] = 1;
                continue;
            }
            double sig = diffusion(x, p);
            double best = -kInf;
            double best_u = cg.levels.front();
            for (double u : cg.levels) {
                double mean = x + drift(x, u, 0.0, p) * dt;
                auto w = kernel_weights(mean, sig * std::sqrt(dt), sg);
                double ev = 0.0;
                for (int j = 0; j < nn; ++j) ev += w[j] * next[j];
                double val = ((m.q - u) * x - epsilon * u * u * x) * dt + disc * ev;
                if (val > best) {
                    best = val;
                    best_u = u;
                }
            }
            if (v_reveal >= best) {
                out.value.at(k, i) = v_reveal;
                reveal[static_cast<std::size_t>(k) * nn + i] = 1;
            } else {
                out.value.at(k, i) = best;
                out.policy.at(k, i) = best_u;
            }
        }
    }

    bool ok = true;
    out.revelation_rule = StoppingRule::below(
        extract_below_thresholds(reveal, entry_absorbed, tg, sg, ok));
    out.threshold_structure = ok;
    return out;
}

namespace {

double threshold_change(const std::vector<double>& a, const std::vector<double>& b,
                        double cap) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double x = a[i], y = b[i];
        if (std::isinf(x) && std::isinf(y) && x == y) continue;
        if (std::isinf(x) || std::isinf(y)) {
            d = std::max(d, cap);
            continue;
        }
        d = std::max(d, std::abs(x - y));
    }
    return d;
}

std::vector<double> damp_thresholds(const std::vector<double>& prev,
                                    const std::vector<double>& next, double damping) {
    std::vector<double> mixed(next.size());
    for (std::size_t i = 0; i < next.size(); ++i) {
        if (std::isinf(prev[i]) || std::isinf(next[i]))
            mixed[i] = next[i];
        else
            mixed[i] = damping * next[i] + (1.0 - damping) * prev[i];
    }
    return mixed;
}

} // namespace

EquilibriumSolution solve_equilibrium(const MarketPrimitives& m, const CklsParams& p,
                                      const TimeGrid& tg, const StateGrid& sg,
                                      const ControlGrid& cg, double x0,
                                      const EquilibriumOptions& opts) {
    check_assumptions(m);
    validate_params(p);
    if (!(opts.damping > 0.0 && opts.damping <= 1.0))
        throw DomainError("damping must lie in (0, 1]");
    if (opts.max_iter < 1) throw DomainError("max_iter must be >= 1");
    if (!(opts.tol > 0.0)) throw DomainError("tol must be positive");

    const int n = tg.n_steps;
    const double cap = sg.nodes.back() - sg.nodes.front();

    StoppingRule entry = StoppingRule::above(std::vector<double>(n + 1, kInf));
    IncumbentResponse inc;
    EntrantResponse ent;
    double residual = kInf;
    int it = 0;
    bool converged = false;

    while (it < opts.max_iter) {
        ++it;
        inc = incumbent_best_response(entry, m, p, tg, sg, cg, opts.epsilon);
        ent = entrant_best_response(inc.policy, inc.revelation_rule, m, p, tg, sg,
                                    cg, x0);
        std::vector<double> mixed =
            damp_thresholds(entry.threshold, ent.entry_rule.threshold, opts.damping);
        residual = threshold_change(entry.threshold, mixed, cap);
        entry = StoppingRule::above(std::move(mixed));
        if (residual <= opts.tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw ConvergenceError("equilibrium best-response iteration did not converge",
                               residual, it);

    EquilibriumSolution sol;
    sol.incumbent_policy = inc.policy;
    sol.revelation_rule = opts.hazard > 0.0
                              ? apply_mixing(inc.revelation_rule, opts.hazard)
                              : inc.revelation_rule;
    sol.entrant_entry_rule = entry;
    sol.entrant_post_entry_policy = ent.post_entry_policy;
    sol.residual = residual;
    sol.iterations = it;

    // Diagnostics from a fresh seeded ensemble under the weak-type scenario.
    FeedbackPolicy zero = FeedbackPolicy::constant(tg, sg, 0.0);
    PathEnsemble ens = simulate_paths(p, sol.incumbent_policy, zero, tg, x0,
                                      opts.n_paths, opts.seed, opts.threads);
    int n_enter = 0, n_reveal = 0;
    double entry_time_sum = 0.0;
    for (int path = 0; path < ens.n_paths; ++path) {
        int tau = first_stop_step(sol.entrant_entry_rule, ens, path, tg.dt(),
                                  ens.seed, kEntryStreamTag);
        if (tau <= n) {
            ++n_enter;
            entry_time_sum += tg.time(tau);
        }
        int rho = first_stop_step(sol.revelation_rule, ens, path, tg.dt(), ens.seed,
                                  kRevealStreamTag);
        if (rho <= n) ++n_reveal;
    }
    sol.diagnostics.entry_prob = static_cast<double>(n_enter) / ens.n_paths;
    sol.diagnostics.mean_entry_time = n_enter > 0 ? entry_time_sum / n_enter : 0.0;
    sol.diagnostics.revelation_prob = static_cast<double>(n_reveal) / ens.n_paths;
    sol.diagnostics.incumbent_payoff =
        incumbent_payoff_mc(ens, sol.revelation_rule, m, p, tg).estimate;
    sol.diagnostics.entrant_payoff =
        entrant_payoff_mc(ens, sol.entrant_entry_rule, IncumbentType::Weak, m, p, tg,
                          EntrantForm::Flow)
            .estimate;
    return sol;
}

} // namespace deterrence
