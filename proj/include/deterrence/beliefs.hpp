#pragma once

#include "deterrence/model.hpp"

namespace deterrence {

/// ln(p / (1-p)). Throws DomainError at p in {0, 1}.
double logit(double p);

/// 1 / (1 + exp(-z)); inverse of logit, saturation-safe for large |z|.
double posterior_prob(double z);

/// Log-likelihood belief at state x_s given initial (x0, z0):
///   z0 + [2 / sigma(x_s)^2] * drift(x_s, u1, u2) * (x_s - x0).
/// Throws DomainError when the diffusion vanishes at x_s.
double belief_update(double x_s, double x0, double z0, double u1, double u2,
                     const CklsParams& p);

} // namespace deterrence
