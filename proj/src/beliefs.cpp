#include "deterrence/beliefs.hpp"

#include <cmath>

namespace deterrence {

double logit(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("logit requires p in (0, 1)");
    return std::log(p / (1.0 - p));
}

double posterior_prob(double z) {
    if (!std::isfinite(z)) throw DomainError("posterior_prob requires finite z");
    // Evaluate on the side that avoids overflow in exp.
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

double belief_update(double x_s, double x0, double z0, double u1, double u2,
                     const CklsParams& p) {
    double sigma = diffusion(x_s, p);
    if (sigma <= 0.0)
        throw DomainError("belief_update requires positive diffusion at x_s");
    return z0 + (2.0 / (sigma * sigma)) * drift(x_s, u1, u2, p) * (x_s - x0);
}

} // namespace deterrence
