#include "deterrence/stopping.hpp"

#include <cmath>

#include "deterrence/rng.hpp"

namespace deterrence {

StoppingRule StoppingRule::above(std::vector<double> thr, double hazard) {
    if (hazard < 0.0) throw DomainError("hazard must be >= 0");
    return StoppingRule{Kind::ThresholdAbove, std::move(thr), hazard};
}

StoppingRule StoppingRule::below(std::vector<double> thr, double hazard) {
    if (hazard < 0.0) throw DomainError("hazard must be >= 0");
    return StoppingRule{Kind::ThresholdBelow, std::move(thr), hazard};
}

StoppingRule StoppingRule::above_const(double thr, int n_nodes, double hazard) {
    return above(std::vector<double>(n_nodes, thr), hazard);
}

StoppingRule StoppingRule::below_const(double thr, int n_nodes, double hazard) {
    return below(std::vector<double>(n_nodes, thr), hazard);
}

bool StoppingRule::triggered(int k, double x) const {
    switch (kind) {
        case Kind::Never: return false;
        case Kind::ThresholdAbove: return x >= threshold[k];
        case Kind::ThresholdBelow: return x <= threshold[k];
    }
    return false;
}

StoppingRule apply_mixing(const StoppingRule& rule, double hazard) {
    if (rule.kind != StoppingRule::Kind::ThresholdBelow)
        throw DomainError("apply_mixing requires a threshold-below rule");
    if (hazard < 0.0) throw DomainError("hazard must be >= 0");
    StoppingRule mixed = rule;
    mixed.hazard = hazard;
    return mixed;
}

int first_stop_step(const StoppingRule& rule, const PathEnsemble& ens, int path,
                    double dt, std::uint64_t seed, std::uint64_t tag) {
    const int n = ens.n_steps;
    if (rule.kind == StoppingRule::Kind::Never) return n + 1;
    if (!rule.threshold.empty() &&
        static_cast<int>(rule.threshold.size()) != n + 1)
        throw GridMismatchError("stopping rule threshold length != time nodes");

    PathRng rng(seed ^ (tag * 0x9e3779b97f4a7c15ull),
                static_cast<std::uint64_t>(path));
    double p_stop = rule.hazard > 0.0 ? 1.0 - std::exp(-rule.hazard * dt) : 1.0;
    for (int k = 0; k <= n; ++k) {
        if (!rule.triggered(k, ens.state(path, k))) continue;
        if (rule.hazard <= 0.0) return k;
        if (rng.next_uniform() < p_stop) return k;
    }
    return n + 1;
}

} // namespace deterrence
