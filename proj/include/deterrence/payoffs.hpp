#pragma once

#include <cstdint>

#include "deterrence/model.hpp"
#include "deterrence/stopping.hpp"

namespace deterrence {

/// Incumbent type: entry pays off only against the weak type.
enum class IncumbentType { Strong, Weak };

/// Entrant payoff functional: lump-sum continuation at the entry time, or
/// discounted flow integral from entry to the horizon. The lump-sum form is
/// the termination value of the pre-entry stopping game.
enum class EntrantForm { LumpSum, Flow };

struct MarketPrimitives {
    double q = 1.0;      ///< weak incumbent signaling flow coefficient (Q)
    double m_w = 1.5;    ///< monopoly flow coefficient (M^w)
    double d_i_w = 0.4;  ///< incumbent duopoly flow coefficient
    double d_e_w = 0.5;  ///< entrant duopoly flow coefficient
    double f = 0.2;      ///< entry fee
    double gamma = 1.0;  ///< discount rate
    double u3_bar = 0.0; ///< post-revelation flow adjustment
    double p0 = 0.5;     ///< prior probability of the strong type
};

/// Validates the parametric assumptions D_E_w > 0, M_w > Q, Q > D_E_w,
/// F > 0, gamma > 0, p0 in (0,1). Throws DomainError listing every
/// violated inequality; returns m unchanged otherwise.
MarketPrimitives check_assumptions(const MarketPrimitives& m);

/// True iff drift(x, u1, u2) <= gamma (finite-discounted-payoff bound).
bool check_discount_bound(double x, double u1, double u2, const CklsParams& p,
                          double gamma);

/// coeff * x / (gamma - drift(x, u1, u2)). Throws DivergenceError when
/// drift >= gamma.
double continuation_value(double x, double u1, double u2, double coeff,
                          const CklsParams& p, double gamma);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    int n_paths = 0;
    std::uint64_t seed = 0;
};

/// Monte Carlo estimate of the incumbent payoff: discounted (Q - u1) X flow
/// before revelation, (M_w - u3_bar) X flow after, plus the discounted
/// terminal duopoly continuation. Left-endpoint Riemann sums on the grid.
McEstimate incumbent_payoff_mc(const PathEnsemble& ens, const StoppingRule& rho_rule,
                               const MarketPrimitives& m, const CklsParams& p,
                               const TimeGrid& grid);

/// Monte Carlo estimate of the entrant payoff under the selected functional
/// form. The entry fee is discounted at the entry time; paths that never
/// enter contribute 0.
McEstimate entrant_payoff_mc(const PathEnsemble& ens, const StoppingRule& entry_rule,
                             IncumbentType theta, const MarketPrimitives& m,
                             const CklsParams& p, const TimeGrid& grid,
                             EntrantForm form = EntrantForm::Flow);

// RNG stream tags separating the mixing draws of the two stopping rules.
inline constexpr std::uint64_t kRevealStreamTag = 1;
inline constexpr std::uint64_t kEntryStreamTag = 2;

/// Pairwise (cascade) sum; deterministic and more accurate than a left fold.
double pairwise_sum(const double* data, std::size_t n);

} // namespace deterrence
