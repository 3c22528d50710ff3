#pragma once

#include <cstdint>

#include "deterrence/grids.hpp"
#include "deterrence/model.hpp"

namespace deterrence {

/// Simulates n_paths full-truncation Euler trajectories under the two
/// feedback policies. Deterministic in seed regardless of thread count
/// (threads = 0 picks hardware concurrency).
PathEnsemble simulate_paths(const CklsParams& p, const FeedbackPolicy& policy1,
                            const FeedbackPolicy& policy2, const TimeGrid& grid,
                            double x0, int n_paths, std::uint64_t seed,
                            int threads = 0);

} // namespace deterrence
