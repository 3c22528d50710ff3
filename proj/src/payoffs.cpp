#include "deterrence/payoffs.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace deterrence {

MarketPrimitives check_assumptions(const MarketPrimitives& m) {
    std::string violations;
    auto add = [&](const std::string& v) {
        if (!violations.empty()) violations += "; ";
        violations += v;
    };
    if (!(m.d_e_w > 0.0)) add("D_E_w > 0 violated");
    if (!(m.m_w > m.q)) add("M_w > Q violated");
    if (!(m.q > m.d_e_w)) add("Q > D_E_w violated");
    if (!(m.f > 0.0)) add("F > 0 violated");
    if (!(m.gamma > 0.0)) add("gamma > 0 violated");
    if (!(m.p0 > 0.0 && m.p0 < 1.0)) add("p0 in (0,1) violated");
    if (!violations.empty()) throw DomainError(violations);
    return m;
}

bool check_discount_bound(double x, double u1, double u2, const CklsParams& p,
                          double gamma) {
    return drift(x, u1, u2, p) <= gamma;
}

double continuation_value(double x, double u1, double u2, double coeff,
                          const CklsParams& p, double gamma) {
    double mu = drift(x, u1, u2, p);
    if (mu >= gamma)
        throw DivergenceError("continuation value diverges: drift >= gamma");
    return coeff * x / (gamma - mu);
}

double pairwise_sum(const double* data, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

namespace {

McEstimate summarize(const std::vector<double>& per_path, std::uint64_t seed) {
    const std::size_t n = per_path.size();
    double mean = pairwise_sum(per_path.data(), n) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : per_path) ss += (v - mean) * (v - mean);
    double se = n > 1 ? std::sqrt(ss / (static_cast<double>(n) * (n - 1))) : 0.0;
    return McEstimate{mean, se, static_cast<int>(n), seed};
}

} // namespace

McEstimate incumbent_payoff_mc(const PathEnsemble& ens, const StoppingRule& rho_rule,
                               const MarketPrimitives& m, const CklsParams& p,
                               const TimeGrid& grid) {
    if (ens.n_steps != grid.n_steps)
        throw GridMismatchError("ensemble and grid disagree on n_steps");
    const int n = grid.n_steps;
    const double dt = grid.dt();
    std::vector<double> per_path(ens.n_paths);

    for (int path = 0; path < ens.n_paths; ++path) {
        int rho = first_stop_step(rho_rule, ens, path, dt, ens.seed, kRevealStreamTag);
        double acc = 0.0;
        for (int k = 0; k < n; ++k) {
            double disc = std::exp(-m.gamma * grid.time(k));
            double x = ens.state(path, k);
            double flow = (k < rho) ? (m.q - ens.u1(path, k)) * x
                                    : (m.m_w - m.u3_bar) * x;
            acc += disc * flow * dt;
        }
        double xt = ens.state(path, n);
        double u1t = ens.u1(path, n - 1);
        double u2t = ens.u2(path, n - 1);
        acc += std::exp(-m.gamma * grid.horizon) *
               continuation_value(xt, u1t, u2t, m.d_i_w, p, m.gamma);
        per_path[path] = acc;
    }
    return summarize(per_path, ens.seed);
}

McEstimate entrant_payoff_mc(const PathEnsemble& ens, const StoppingRule& entry_rule,
                             IncumbentType theta, const MarketPrimitives& m,
                             const CklsParams& p, const TimeGrid& grid,
                             EntrantForm form) {
    if (ens.n_steps != grid.n_steps)
        throw GridMismatchError("ensemble and grid disagree on n_steps");
    const int n = grid.n_steps;
    const double dt = grid.dt();
    const bool weak = theta == IncumbentType::Weak;
    std::vector<double> per_path(ens.n_paths);

    for (int path = 0; path < ens.n_paths; ++path) {
        int tau = first_stop_step(entry_rule, ens, path, dt, ens.seed, kEntryStreamTag);
        if (tau > n) {
            per_path[path] = 0.0;
            continue;
        }
        double fee = m.f * std::exp(-m.gamma * grid.time(tau));
        double gain = 0.0;
        if (form == EntrantForm::LumpSum) {
            if (weak) {
                int kc = std::min(tau, n - 1); // controls recorded per step
                double x = ens.state(path, tau);
                double u1 = ens.u1(path, kc);
                double u2 = ens.u2(path, kc);
                gain = std::exp(-m.gamma * grid.time(tau)) *
                       continuation_value(x, u1, u2, m.d_e_w - u2 * u2, p, m.gamma);
            }
        } else {
            if (weak) {
                for (int k = tau; k < n; ++k) {
                    double x = ens.state(path, k);
                    double u2 = ens.u2(path, k);
                    gain += std::exp(-m.gamma * grid.time(k)) *
                            (m.d_e_w - u2 * u2) * x * dt;
                }
            }
        }
        per_path[path] = gain - fee;
    }
    return summarize(per_path, ens.seed);
}

} // namespace deterrence
