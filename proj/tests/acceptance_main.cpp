// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Pinned tolerances are recorded next to each check.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "deterrence/config.hpp"
#include "deterrence/equilibrium.hpp"
#include "deterrence/paths.hpp"
#include "deterrence/rng.hpp"
#include "oracles.hpp"

using namespace deterrence;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << criterion << ": "
              << detail << std::endl;
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

CklsParams reference_params() { return CklsParams{0.5, -1.0, 0.3, 0.5, 0.1, 0.1}; }

MarketPrimitives reference_market() {
    MarketPrimitives m;
    m.q = 1.0;
    m.m_w = 1.5;
    m.d_i_w = 0.4;
    m.d_e_w = 0.5;
    m.f = 0.2;
    m.gamma = 1.0;
    m.p0 = 0.5;
    return m;
}

// Reference desk-scale instance: t = 1, 80 nodes, 40 steps, 5 control levels;
// kernel resolution sigma(x_min) sqrt(dt) = 0.0212 >= h/2 = 0.0177.
struct ReferenceInstance {
    TimeGrid tg{1.0, 40};
    StateGrid sg = StateGrid::uniform(0.2, 3.0, 80);
    ControlGrid cg = ControlGrid::uniform(0.0, 1.0, 5);
};

// --- criterion 1: SDE ensemble mean vs the closed-form mean ODE ------------

void criterion_1() {
    CklsParams p{0.5, -1.0, 0.3, 0.5, 0.0, 0.0};
    TimeGrid tg{1.0, 200};
    StateGrid sg = StateGrid::uniform(0.0, 10.0, 3);
    auto zero = FeedbackPolicy::constant(tg, sg, 0.0);
    auto t0 = std::chrono::steady_clock::now();
    auto ens = simulate_paths(p, zero, zero, tg, 1.0, 100000, 42, /*threads=*/1);
    double elapsed = seconds_since(t0);

    std::vector<double> finals(ens.n_paths);
    for (int i = 0; i < ens.n_paths; ++i) finals[i] = ens.state(i, tg.n_steps);
    double mean = pairwise_sum(finals.data(), finals.size()) / ens.n_paths;
    double ss = 0.0;
    for (double v : finals) ss += (v - mean) * (v - mean);
    double se = std::sqrt(ss / (ens.n_paths - 1.0) / ens.n_paths);

    const double target = 0.683940; // closed-form mean ODE at t = 1
    bool pass = std::abs(mean - target) <= 3.0 * se && elapsed <= 10.0;
    std::ostringstream msg;
    msg << "SDE mean " << mean << " vs 0.683940 within 3 se (se=" << se
        << "), runtime " << elapsed << " s <= 10 s";
    report(1, pass, msg.str());
}

// --- criterion 2: belief identities ----------------------------------------

void criterion_2() {
    PathRng rng(2026, 0);
    bool exact = true;
    for (int i = 0; i < 1000; ++i) {
        CklsParams p{rng.next_normal(), rng.next_normal(),
                     0.05 + rng.next_uniform(), 0.5 + rng.next_uniform(),
                     rng.next_normal(), rng.next_normal()};
        double x0 = 0.1 + 2.0 * rng.next_uniform();
        double z0 = rng.next_normal();
        if (belief_update(x0, x0, z0, rng.next_normal(), rng.next_normal(), p) != z0)
            exact = false;
    }
    double worst = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        double pr = 1e-6 + (1.0 - 2e-6) * i / 2000.0;
        worst = std::max(worst, std::abs(posterior_prob(logit(pr)) - pr));
    }
    bool pass = exact && worst <= 1e-12;
    std::ostringstream msg;
    msg << "belief_update exact at x_s=x0 over 1000 draws; round-trip error "
        << worst << " <= 1e-12";
    report(2, pass, msg.str());
}

// --- criterion 3: triple-oracle equivalence on a tiny instance -------------

ControlProblem tiny_instance() {
    // 3 time steps x 5 state nodes x 2 control levels, sized so that the
    // kernel resolution guard and the explicit CFL bounds (diffusion and
    // advection) both hold: h = 0.2, sqrt(dt) = 0.577, sigma in [0.206,
    // 0.288], |drift| <= 0.14.
    CklsParams p{0.2, -0.2, 0.23, 0.5, 0.1, 0.0};
    MarketPrimitives m = reference_market();
    ControlProblem prob;
    prob.time_grid = TimeGrid{1.0, 3};
    prob.state_grid = StateGrid::uniform(0.8, 1.6, 5);
    prob.control_grid = ControlGrid::uniform(0.0, 1.0, 2);
    prob.gamma = m.gamma;
    prob.reward = [m](int, double x, double u) { return (m.q - u) * x; };
    prob.drift = [p](int, double x, double u) { return drift(x, u, 0.0, p); };
    prob.sigma = [p](double x) { return diffusion(x, p); };
    prob.terminal.resize(5);
    for (int i = 0; i < 5; ++i)
        prob.terminal[i] = continuation_value(prob.state_grid.nodes[i], 0.0, 0.0,
                                              m.d_i_w, p, m.gamma);
    return prob;
}

void criterion_3() {
    auto prob = tiny_instance();
    auto dp = oracles::brute_force_dp(prob);
    auto pic = backward_value(prob);
    FdScheme ex;
    ex.time_stepping = FdScheme::TimeStepping::Explicit;
    ex.cfl_safety = 1.0;
    auto hjb = solve_hjb_fd(prob, ex);

    const int nn = prob.state_grid.n_nodes();
    double pic_gap = 0.0, hjb_gap = 0.0;
    bool pic_policy = true, hjb_policy = true;
    for (int k = 0; k <= prob.time_grid.n_steps; ++k)
        for (int i = 0; i < nn; ++i) {
            double ref = dp.values[static_cast<std::size_t>(k) * nn + i];
            pic_gap = std::max(pic_gap, std::abs(pic.value.at(k, i) - ref));
            hjb_gap = std::max(hjb_gap, std::abs(hjb.value.at(k, i) - ref));
            double ref_u = dp.policy[static_cast<std::size_t>(k) * nn + i];
            if (pic.policy.at(k, i) != ref_u) pic_policy = false;
            if (hjb.policy.at(k, i) != ref_u) hjb_policy = false;
        }
    // pinned: pic shares the kernel quadrature with the DP (1e-9); the FD
    // scheme discretizes differently, pinned at 0.05 absolute on this instance
    bool pass = pic_gap <= 1e-9 && pic_policy && hjb_gap <= 0.05 && hjb_policy;
    std::ostringstream msg;
    msg << "tiny instance: |pic-dp| " << pic_gap << " <= 1e-9, |hjb-dp| "
        << hjb_gap << " <= 0.05, policies identical ("
        << (pic_policy && hjb_policy ? "yes" : "no") << ")";
    report(3, pass, msg.str());
}

// --- criterion 4: desk-scale cross-validation ------------------------------

void criterion_4() {
    ReferenceInstance ref;
    auto t0 = std::chrono::steady_clock::now();
    auto prob = incumbent_problem(reference_market(), reference_params(), ref.tg,
                                  ref.sg, ref.cg, StoppingRule::never(), 0.0);
    auto pic = backward_value(prob);
    auto hjb = solve_hjb_fd(prob, FdScheme{});
    auto rep = cross_validate(pic, hjb, 0.05, 0.95);
    double elapsed = seconds_since(t0);
    bool pass = rep.pass && elapsed <= 60.0;
    std::ostringstream msg;
    msg << "reference instance: value gap " << rep.value_gap
        << " <= 0.05, policy agreement " << rep.policy_agreement
        << " >= 0.95, runtime " << elapsed << " s <= 60 s";
    report(4, pass, msg.str());
}

// --- criterion 5: comparative statics --------------------------------------

void criterion_5() {
    ReferenceInstance ref;
    EquilibriumOptions opts;
    opts.n_paths = 2000;

    bool monotone_f = true;
    std::vector<double> prev;
    for (double fee : {0.05, 0.1, 0.2, 0.4}) {
        MarketPrimitives m = reference_market();
        m.f = fee;
        auto sol = solve_equilibrium(m, reference_params(), ref.tg, ref.sg, ref.cg,
                                     1.0, opts);
        const auto& thr = sol.entrant_entry_rule.threshold;
        if (!prev.empty())
            for (std::size_t k = 0; k < thr.size(); ++k)
                if (thr[k] < prev[k]) monotone_f = false;
        prev = thr;
    }

    bool shrinking_p0 = true;
    prev.clear();
    for (double p0 : {0.2, 0.5, 0.8}) {
        MarketPrimitives m = reference_market();
        m.p0 = p0;
        auto sol = solve_equilibrium(m, reference_params(), ref.tg, ref.sg, ref.cg,
                                     1.0, opts);
        const auto& thr = sol.entrant_entry_rule.threshold;
        if (!prev.empty())
            for (std::size_t k = 0; k < thr.size(); ++k)
                if (thr[k] < prev[k]) shrinking_p0 = false;
        prev = thr;
    }

    bool pass = monotone_f && shrinking_p0;
    std::ostringstream msg;
    msg << "entry thresholds nondecreasing in F over (0.05,0.1,0.2,0.4): "
        << (monotone_f ? "yes" : "no")
        << "; entry region shrinks in p0 over (0.2,0.5,0.8): "
        << (shrinking_p0 ? "yes" : "no");
    report(5, pass, msg.str());
}

// --- criterion 6: equilibrium structure ------------------------------------

void criterion_6() {
    ReferenceInstance ref;
    CklsParams p = reference_params();
    MarketPrimitives m = reference_market();
    EquilibriumOptions opts;
    opts.n_paths = 10000;
    auto sol = solve_equilibrium(m, p, ref.tg, ref.sg, ref.cg, 1.0, opts);

    bool ordered = true;
    for (int k = 0; k <= ref.tg.n_steps; ++k)
        if (!(sol.revelation_rule.threshold[k] <=
              sol.entrant_entry_rule.threshold[k]))
            ordered = false;
    bool small_residual = sol.residual <= 1e-4;

    // against the strong type every entering path realizes exactly -F e^{-g tau}
    FeedbackPolicy zero = FeedbackPolicy::constant(ref.tg, ref.sg, 0.0);
    auto ens = simulate_paths(p, sol.incumbent_policy, zero, ref.tg, 1.0, 10000,
                              opts.seed);
    auto est = entrant_payoff_mc(ens, sol.entrant_entry_rule,
                                 IncumbentType::Strong, m, p, ref.tg,
                                 EntrantForm::LumpSum);
    std::vector<double> expected(ens.n_paths, 0.0);
    int n_enter = 0;
    for (int path = 0; path < ens.n_paths; ++path) {
        int tau = first_stop_step(sol.entrant_entry_rule, ens, path, ref.tg.dt(),
                                  ens.seed, kEntryStreamTag);
        if (tau <= ref.tg.n_steps) {
            expected[path] = -m.f * std::exp(-m.gamma * ref.tg.time(tau));
            ++n_enter;
        }
    }
    double exp_mean = pairwise_sum(expected.data(), expected.size()) / ens.n_paths;
    bool fee_exact = est.estimate == exp_mean;

    bool pass = ordered && small_residual && fee_exact;
    std::ostringstream msg;
    msg << "revelation <= entry threshold at every node: " << (ordered ? "yes" : "no")
        << "; residual " << sol.residual << " <= 1e-4; vs strong type "
        << n_enter << " entering paths realize exactly -F e^(-gamma tau): "
        << (fee_exact ? "yes" : "no");
    report(6, pass, msg.str());
}

// --- criterion 7: mixing law chi-square ------------------------------------

void criterion_7() {
    // hazard 2, dt = 0.01, 1e5 constant sub-threshold paths
    CklsParams p{0.0, 0.0, 0.0, 0.5, 0.0, 0.0};
    TimeGrid tg{1.0, 100};
    StateGrid sg = StateGrid::uniform(0.0, 2.0, 3);
    auto zero = FeedbackPolicy::constant(tg, sg, 0.0);
    auto ens = simulate_paths(p, zero, zero, tg, 0.5, 100000, 271);
    auto rule = apply_mixing(StoppingRule::below_const(0.9, tg.n_steps + 1), 2.0);

    const int kBins = 25; // steps 0..24 plus one tail bin
    std::vector<int> observed(kBins + 1, 0);
    for (int path = 0; path < ens.n_paths; ++path) {
        int step = first_stop_step(rule, ens, path, tg.dt(), ens.seed, 1);
        observed[std::min(step, kBins)]++;
    }
    double q = 1.0 - std::exp(-2.0 * tg.dt());
    double chi2 = 0.0;
    for (int k = 0; k < kBins; ++k) {
        double e = ens.n_paths * q * std::pow(1.0 - q, k);
        chi2 += (observed[k] - e) * (observed[k] - e) / e;
    }
    double e_tail = ens.n_paths * std::pow(1.0 - q, kBins);
    chi2 += (observed[kBins] - e_tail) * (observed[kBins] - e_tail) / e_tail;

    // chi-square critical value at the 1% level, 25 degrees of freedom
    const double kCritical = 44.3141;
    bool pass = chi2 <= kCritical;
    std::ostringstream msg;
    msg << "geometric mixing law: chi-square " << chi2 << " <= " << kCritical
        << " (df=25, 1% level)";
    report(7, pass, msg.str());
}

// --- criteria 8 and 9: CLI guards and reproducibility ----------------------

#ifndef DETERRENCE_CLI_PATH
#error "DETERRENCE_CLI_PATH must point at the CLI binary"
#endif

int run_cli(const std::string& args, const std::string& env = "") {
    std::string cmd = env + " \"" + std::string(DETERRENCE_CLI_PATH) + "\" " + args +
                      " >/dev/null 2>acceptance_stderr.txt";
    return WEXITSTATUS(std::system(cmd.c_str()));
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

fs::path write_scenario(const std::string& name, const std::string& contents) {
    fs::path dir = fs::path("acceptance_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream out(dir / "scenario.txt");
    out << contents;
    return dir;
}

void criterion_8() {
    struct Guard {
        const char* name;
        const char* config;
        int exit_code;
        const char* needle;
    };
    const std::vector<Guard> guards = {
        {"M_w > Q", "m_w = 0.5\n", 2, "M_w > Q violated"},
        {"Q > D_E_w", "d_e_w = 1.5\n", 2, "Q > D_E_w violated"},
        {"F > 0", "f = 0\n", 2, "F > 0 violated"},
        // drift 2.0 >= gamma everywhere: the continuation value diverges
        {"discount bound", "alpha1 = 2.0\nalpha2 = 0\nn_steps = 20\nn_nodes = 40\n",
         4, "divergence"},
    };
    bool pass = true;
    std::ostringstream msg;
    msg << "CLI guards:";
    for (const auto& g : guards) {
        fs::path dir = write_scenario("guard", g.config);
        std::string sub = g.exit_code == 4 ? "solve-pic" : "simulate";
        int rc = run_cli(sub + " --config " + (dir / "scenario.txt").string() +
                         " --out " + dir.string());
        std::string err = read_file("acceptance_stderr.txt");
        bool ok = rc == g.exit_code && err.find(g.needle) != std::string::npos;
        if (!ok) pass = false;
        msg << " [" << g.name << " -> exit " << rc << " want " << g.exit_code
            << (ok ? " ok]" : " FAIL]");
    }
    report(8, pass, msg.str());
}

void criterion_9() {
    const std::string sim_cfg = "n_steps = 50\nn_paths = 64\nseed = 11\n";
    const std::string eq_cfg =
        "n_steps = 20\nn_nodes = 60\nn_controls = 3\nn_paths = 200\n";

    fs::path a = write_scenario("repro_a", sim_cfg);
    fs::path b = write_scenario("repro_b", sim_cfg);
    bool pass = true;
    pass &= run_cli("simulate --config " + (a / "scenario.txt").string() +
                    " --out " + a.string(), "DETERRENCE_THREADS=1") == 0;
    pass &= run_cli("simulate --config " + (b / "scenario.txt").string() +
                    " --out " + b.string(), "DETERRENCE_THREADS=8") == 0;
    bool sim_same = read_file(a / "paths.csv") == read_file(b / "paths.csv") &&
                    !read_file(a / "paths.csv").empty();

    fs::path c = write_scenario("repro_c", eq_cfg);
    fs::path d = write_scenario("repro_d", eq_cfg);
    pass &= run_cli("equilibrium --config " + (c / "scenario.txt").string() +
                    " --out " + c.string(), "DETERRENCE_THREADS=2") == 0;
    pass &= run_cli("equilibrium --config " + (d / "scenario.txt").string() +
                    " --out " + d.string(), "DETERRENCE_THREADS=5") == 0;
    bool eq_same =
        read_file(c / "diagnostics.csv") == read_file(d / "diagnostics.csv") &&
        read_file(c / "equilibrium.csv") == read_file(d / "equilibrium.csv") &&
        !read_file(c / "diagnostics.csv").empty();

    pass = pass && sim_same && eq_same;
    std::ostringstream msg;
    msg << "byte-identical reruns across thread counts: simulate "
        << (sim_same ? "yes" : "no") << ", equilibrium "
        << (eq_same ? "yes" : "no");
    report(9, pass, msg.str());
}

void run(int criterion, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        report(criterion, false, std::string("exception: ") + e.what());
    }
}

} // namespace

int main() {
    run(1, criterion_1);
    run(2, criterion_2);
    run(3, criterion_3);
    run(4, criterion_4);
    run(5, criterion_5);
    run(6, criterion_6);
    run(7, criterion_7);
    run(8, criterion_8);
    run(9, criterion_9);
    if (g_failures == 0) {
        std::cout << "acceptance: all 9 criteria passed" << std::endl;
        return 0;
    }
    std::cout << "acceptance: " << g_failures << " criteria failed" << std::endl;
    return 1;
}
