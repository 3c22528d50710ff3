#include "deterrence/model.hpp"

#include <algorithm>
#include <cmath>

namespace deterrence {

CklsParams validate_params(const CklsParams& p) {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(p.alpha1)) throw DomainError("alpha1 must be finite");
    if (!finite(p.alpha2)) throw DomainError("alpha2 must be finite");
    if (!finite(p.alpha3) || p.alpha3 < 0.0)
        throw DomainError("alpha3 must be finite and >= 0");
    if (!finite(p.alpha4) || p.alpha4 < 0.5 || p.alpha4 > 1.5)
        throw DomainError("alpha4 must lie in [0.5, 1.5]");
    if (!finite(p.theta1)) throw DomainError("theta1 must be finite");
    if (!finite(p.theta2)) throw DomainError("theta2 must be finite");
    return p;
}

TimeGrid validate_grid(const TimeGrid& g) {
    if (!(g.horizon > 0.0) || !std::isfinite(g.horizon))
        throw DomainError("horizon must be positive and finite");
    if (g.n_steps < 1) throw DomainError("n_steps must be >= 1");
    return g;
}

TimeGrid build_partition(double t, int n) {
    return validate_grid(TimeGrid{t, n});
}

double diffusion(double x, const CklsParams& p) {
    if (x <= 0.0) return 0.0;
    return p.alpha3 * std::pow(x, p.alpha4);
}

double step_euler(double x, double u1, double u2, double dt, double noise,
                  const CklsParams& p) {
    double xc = std::max(x, 0.0);
    double next = xc + drift(xc, u1, u2, p) * dt + diffusion(xc, p) * std::sqrt(dt) * noise;
    return std::max(next, 0.0);
}

} // namespace deterrence
