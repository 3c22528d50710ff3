#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "deterrence/pic.hpp"
#include "deterrence/rng.hpp"
#include "oracles.hpp"

using namespace deterrence;

namespace {

CklsParams reference_params() { return CklsParams{0.5, -1.0, 0.3, 0.5, 0.1, 0.0}; }

MarketPrimitives reference_market() {
    MarketPrimitives m;
    m.q = 1.0;
    m.m_w = 1.5;
    m.d_i_w = 0.4;
    m.d_e_w = 0.5;
    m.f = 0.2;
    m.gamma = 1.0;
    return m;
}

// Tiny instance with a well-resolved kernel (sigma sqrt(dt) >= h/2).
ControlProblem tiny_problem(int n_steps = 3, int n_nodes = 5, int n_controls = 2) {
    CklsParams p{0.5, -1.0, 0.6, 0.5, 0.1, 0.0};
    MarketPrimitives m = reference_market();
    ControlProblem prob;
    prob.time_grid = TimeGrid{1.0, n_steps};
    prob.state_grid = StateGrid::uniform(0.5, 2.0, n_nodes);
    prob.control_grid = ControlGrid::uniform(0.0, 1.0, n_controls);
    prob.gamma = m.gamma;
    prob.reward = [m](int, double x, double u) { return (m.q - u) * x; };
    prob.drift = [p](int, double x, double u) { return drift(x, u, 0.0, p); };
    prob.sigma = [p](double x) { return diffusion(x, p); };
    prob.terminal.resize(n_nodes);
    for (int i = 0; i < n_nodes; ++i)
        prob.terminal[i] = continuation_value(prob.state_grid.nodes[i], 0.0, 0.0,
                                              m.d_i_w, p, m.gamma);
    return prob;
}

} // namespace

TEST_CASE("lagrangian increment") {
    CklsParams p = reference_params();
    double dt = 0.1;
    double x = 1.0;
    double on_drift = x + drift(x, 0.3, 0.0, p) * dt;
    CHECK(lagrangian_increment(x, on_drift, 0.3, dt, 0.0, p) == doctest::Approx(0.0));
    CHECK(lagrangian_increment(x, on_drift, 0.3, dt, 2.0, p) == doctest::Approx(-0.2));

    // hand value: drift 0, sigma 0.3, step 0.1
    CklsParams flat{0.0, 0.0, 0.3, 0.5, 0.0, 0.0};
    CHECK(lagrangian_increment(1.0, 1.1, 0.0, 0.1, 0.0, flat) ==
          doctest::Approx(0.01 / (2.0 * 0.09 * 0.1)));
}

TEST_CASE("euclidean action sums discounted increments") {
    CklsParams p = reference_params();
    MarketPrimitives m = reference_market();
    TimeGrid grid{0.2, 2};
    std::vector<double> path = {1.0, 1.1, 0.95};
    std::vector<double> controls = {0.2, 0.6};

    double expected = 0.0;
    for (int k = 0; k < 2; ++k) {
        double reward = std::exp(-m.gamma * grid.time(k)) *
                        (m.q - controls[k]) * path[k];
        expected += lagrangian_increment(path[k], path[k + 1], controls[k],
                                         grid.dt(), reward, p);
    }
    CHECK(euclidean_action(path, controls, grid, m, p) == doctest::Approx(expected));

    // on-drift path with zero reward has zero action
    MarketPrimitives m0 = m;
    m0.q = 0.0;
    std::vector<double> drift_path = {1.0, 0.0, 0.0};
    drift_path[1] = 1.0 + drift(1.0, 0.0, 0.0, p) * grid.dt();
    drift_path[2] = drift_path[1] + drift(drift_path[1], 0.0, 0.0, p) * grid.dt();
    CHECK(euclidean_action(drift_path, {0.0, 0.0}, grid, m0, p) ==
          doctest::Approx(0.0));

    // kinetic term is even in the deviation
    std::vector<double> up = {1.0, 1.0 + drift(1.0, 0.0, 0.0, p) * grid.dt() + 0.05};
    std::vector<double> down = {1.0, 1.0 + drift(1.0, 0.0, 0.0, p) * grid.dt() - 0.05};
    TimeGrid one{0.1, 1};
    CHECK(euclidean_action(up, {0.0}, one, m0, p) ==
          doctest::Approx(euclidean_action(down, {0.0}, one, m0, p)));
}

TEST_CASE("kernel weights form a probability distribution") {
    StateGrid sg = StateGrid::uniform(0.0, 2.0, 21);
    PathRng rng(8, 0);
    for (int i = 0; i < 200; ++i) {
        double mean = -0.5 + 3.0 * rng.next_uniform();
        double sd = 0.01 + 0.5 * rng.next_uniform();
        auto w = kernel_weights(mean, sd, sg);
        double sum = 0.0;
        for (double v : w) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-8));
    }
    // point mass when the noise vanishes
    auto w = kernel_weights(0.63, 0.0, sg);
    CHECK(w[sg.nearest(0.63)] == 1.0);
}

TEST_CASE("constant terminal propagates with exact discounting") {
    ControlProblem prob = tiny_problem(8, 9, 3);
    double c = 2.5;
    prob.terminal.assign(prob.state_grid.n_nodes(), c);
    prob.reward = [](int, double, double) { return 0.0; };
    auto sol = backward_value(prob);
    for (int k = 0; k <= prob.time_grid.n_steps; ++k) {
        double expect = c * std::exp(-prob.gamma * (prob.time_grid.horizon -
                                                    prob.time_grid.time(k)));
        for (int i = 0; i < prob.state_grid.n_nodes(); ++i)
            CHECK(sol.value.at(k, i) == doctest::Approx(expect).epsilon(1e-6));
    }
}

TEST_CASE("pure-cost control selects the smallest level everywhere") {
    ControlProblem prob = tiny_problem(4, 7, 4);
    CklsParams p{0.5, -1.0, 0.6, 0.5, 0.0, 0.0}; // theta1 = 0
    prob.drift = [p](int, double x, double u) { return drift(x, u, 0.0, p); };
    prob.sigma = [p](double x) { return diffusion(x, p); };
    auto sol = backward_value(prob);
    for (int k = 0; k < prob.time_grid.n_steps; ++k)
        for (int i = 0; i < prob.state_grid.n_nodes(); ++i)
            CHECK(sol.policy.at(k, i) == 0.0);
}

TEST_CASE("matches brute-force DP on a tiny instance") {
    ControlProblem prob = tiny_problem();
    auto sol = backward_value(prob);
    auto dp = oracles::brute_force_dp(prob);
    const int nn = prob.state_grid.n_nodes();
    for (int k = 0; k <= prob.time_grid.n_steps; ++k)
        for (int i = 0; i < nn; ++i) {
            CHECK(sol.value.at(k, i) ==
                  doctest::Approx(dp.values[k * nn + i]).epsilon(1e-12));
            CHECK(sol.policy.at(k, i) == dp.policy[k * nn + i]);
        }
}

TEST_CASE("backward_value is monotone in the terminal data") {
    ControlProblem lo = tiny_problem(4, 7, 3);
    ControlProblem hi = lo;
    PathRng rng(77, 0);
    for (int i = 0; i < hi.state_grid.n_nodes(); ++i)
        hi.terminal[i] = lo.terminal[i] + rng.next_uniform();
    auto sol_lo = backward_value(lo);
    auto sol_hi = backward_value(hi);
    for (std::size_t i = 0; i < sol_lo.value.values.size(); ++i)
        CHECK(sol_hi.value.values[i] >= sol_lo.value.values[i] - 1e-12);
}

TEST_CASE("affine Hamiltonian yields bang-bang controls in the interior") {
    // Linear terminal data keeps the continuation affine in the control at
    // nodes whose kernel mass stays inside the grid.
    ControlProblem prob = tiny_problem(1, 41, 5);
    prob.state_grid = StateGrid::uniform(0.5, 4.5, 41);
    prob.terminal.resize(41);
    for (int i = 0; i < 41; ++i) prob.terminal[i] = 2.0 * prob.state_grid.nodes[i];
    auto sol = backward_value(prob);
    double lo = prob.control_grid.levels.front();
    double hi = prob.control_grid.levels.back();
    for (int i = 12; i < 29; ++i) {
        double u = sol.policy.at(0, i);
        CHECK((u == lo || u == hi));
    }
}

TEST_CASE("resolution guard rejects a too-coarse grid") {
    ControlProblem prob = tiny_problem();
    CklsParams p{0.5, -1.0, 0.01, 0.5, 0.1, 0.0}; // tiny noise
    prob.sigma = [p](double x) { return diffusion(x, p); };
    CHECK_THROWS_AS(backward_value(prob), ResolutionError);
}

TEST_CASE("solve_incumbent limit cases") {
    CklsParams p = reference_params();
    p.theta1 = 0.0;
    p.alpha3 = 0.6;
    MarketPrimitives m = reference_market();
    TimeGrid tg{1.0, 4};
    StateGrid sg = StateGrid::uniform(0.5, 2.0, 7);
    ControlGrid cg = ControlGrid::uniform(0.0, 1.0, 3);

    // no entry threat, pure-cost control: never promote
    auto sol = solve_incumbent(m, p, tg, sg, cg, StoppingRule::never());
    for (int k = 0; k < tg.n_steps; ++k)
        for (int i = 0; i < sg.n_nodes(); ++i)
            CHECK(sol.policy.at(k, i) == 0.0);

    // immediate entry everywhere absorbs into the duopoly continuation
    auto absorbed = solve_incumbent(m, p, tg, sg, cg,
                                    StoppingRule::above_const(0.0, tg.n_steps + 1));
    for (int k = 0; k <= tg.n_steps; ++k)
        for (int i = 0; i < sg.n_nodes(); ++i)
            CHECK(absorbed.value.at(k, i) ==
                  doctest::Approx(continuation_value(sg.nodes[i], 0.0, 0.0, m.d_i_w,
                                                     p, m.gamma)));

    // tiny instance with a regime switch against the brute-force DP
    auto rule = StoppingRule::above_const(1.6, tg.n_steps + 1);
    auto prob = incumbent_problem(m, p, tg, sg, cg, rule);
    auto pic = backward_value(prob);
    auto dp = oracles::brute_force_dp(prob);
    for (int k = 0; k <= tg.n_steps; ++k)
        for (int i = 0; i < sg.n_nodes(); ++i) {
            CHECK(pic.value.at(k, i) ==
                  doctest::Approx(dp.values[k * sg.n_nodes() + i]).epsilon(1e-12));
            CHECK(pic.policy.at(k, i) == dp.policy[k * sg.n_nodes() + i]);
        }
}
