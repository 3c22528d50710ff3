#include "deterrence/paths.hpp"

#include <thread>

#include "deterrence/rng.hpp"

namespace deterrence {

namespace {

void simulate_range(PathEnsemble& ens, const CklsParams& p,
                    const FeedbackPolicy& pol1, const FeedbackPolicy& pol2,
                    const TimeGrid& grid, double x0, std::uint64_t seed,
                    int begin, int end) {
    const int n = grid.n_steps;
    const double dt = grid.dt();
    for (int path = begin; path < end; ++path) {
        PathRng rng(seed, static_cast<std::uint64_t>(path));
        std::size_t srow = static_cast<std::size_t>(path) * (n + 1);
        std::size_t crow = static_cast<std::size_t>(path) * n;
        double x = x0;
        ens.states[srow] = x;
        for (int k = 0; k < n; ++k) {
            double u1 = pol1.eval(k, x);
            double u2 = pol2.eval(k, x);
            ens.controls_u1[crow + k] = u1;
            ens.controls_u2[crow + k] = u2;
            x = step_euler(x, u1, u2, dt, rng.next_normal(), p);
            ens.states[srow + k + 1] = x;
        }
    }
}

} // namespace

PathEnsemble simulate_paths(const CklsParams& p, const FeedbackPolicy& policy1,
                            const FeedbackPolicy& policy2, const TimeGrid& grid,
                            double x0, int n_paths, std::uint64_t seed,
                            int threads) {
    validate_params(p);
    validate_grid(grid);
    if (!(x0 > 0.0)) throw DomainError("x0 must be positive");
    if (n_paths < 1) throw DomainError("n_paths must be >= 1");

    const int n = grid.n_steps;
    PathEnsemble ens;
    ens.n_paths = n_paths;
    ens.n_steps = n;
    ens.seed = seed;
    ens.times.resize(n + 1);
    for (int k = 0; k <= n; ++k) ens.times[k] = grid.time(k);
    ens.states.resize(static_cast<std::size_t>(n_paths) * (n + 1));
    ens.controls_u1.resize(static_cast<std::size_t>(n_paths) * n);
    ens.controls_u2.resize(static_cast<std::size_t>(n_paths) * n);

    int n_threads = threads > 0 ? threads
                                : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    n_threads = std::min(n_threads, n_paths);

    if (n_threads == 1) {
        simulate_range(ens, p, policy1, policy2, grid, x0, seed, 0, n_paths);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        int chunk = (n_paths + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            int begin = t * chunk;
            int end = std::min(begin + chunk, n_paths);
            if (begin >= end) break;
            pool.emplace_back([&, begin, end] {
                simulate_range(ens, p, policy1, policy2, grid, x0, seed, begin, end);
            });
        }
        for (auto& th : pool) th.join();
    }
    return ens;
}

} // namespace deterrence
