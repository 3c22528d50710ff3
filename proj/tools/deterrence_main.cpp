#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "deterrence/config.hpp"
#include "deterrence/csv.hpp"
#include "deterrence/paths.hpp"

namespace dt = deterrence;
namespace fs = std::filesystem;

namespace {

struct RunContext {
    dt::ScenarioConfig cfg;
    std::uint64_t hash = 0;
    fs::path out_dir;

    std::string out(const std::string& name) const {
        return (out_dir / name).string();
    }
};

int effective_threads(const dt::ScenarioConfig& cfg) {
    if (cfg.threads > 0) return cfg.threads;
    if (const char* env = std::getenv("DETERRENCE_THREADS"))
        return std::atoi(env);
    return 0;
}

dt::StoppingRule entry_rule_from(const dt::ScenarioConfig& cfg) {
    if (std::isinf(cfg.entry_threshold) && cfg.entry_threshold > 0.0)
        return dt::StoppingRule::never();
    return dt::StoppingRule::above_const(cfg.entry_threshold, cfg.n_steps + 1);
}

dt::StoppingRule reveal_rule_from(const dt::ScenarioConfig& cfg) {
    if (std::isinf(cfg.reveal_threshold) && cfg.reveal_threshold < 0.0)
        return dt::StoppingRule::never();
    return dt::StoppingRule::below_const(cfg.reveal_threshold, cfg.n_steps + 1,
                                         cfg.hazard);
}

void write_policy_csv(const RunContext& ctx, const std::string& name,
                      const dt::SolveResult& sol) {
    dt::CsvWriter csv(ctx.out(name), "time_index,state_index,time,x,u_star,value",
                      ctx.hash, ctx.cfg.seed);
    const auto& tg = sol.value.time_grid;
    const auto& sg = sol.value.state_grid;
    for (int k = 0; k <= tg.n_steps; ++k)
        for (int i = 0; i < sg.n_nodes(); ++i)
            csv.row({std::to_string(k), std::to_string(i),
                     dt::format_g17(tg.time(k)), dt::format_g17(sg.nodes[i]),
                     dt::format_g17(sol.policy.at(k, i)),
                     dt::format_g17(sol.value.at(k, i))});
}

int cmd_simulate(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    auto tg = cfg.time_grid();
    auto sg = cfg.state_grid();
    auto pol1 = dt::FeedbackPolicy::constant(tg, sg, cfg.u1_const);
    auto pol2 = dt::FeedbackPolicy::constant(tg, sg, cfg.u2_const);
    auto ens = dt::simulate_paths(cfg.ckls(), pol1, pol2, tg, cfg.x0, cfg.n_paths,
                                  cfg.seed, effective_threads(cfg));

    std::string header = "path_id,step,time,x,u1,u2";
    if (cfg.export_beliefs) header += ",z";
    dt::CsvWriter csv(ctx.out("paths.csv"), header, ctx.hash, cfg.seed);
    auto p = cfg.ckls();
    double z0 = dt::logit(cfg.p0);
    for (int path = 0; path < ens.n_paths; ++path) {
        for (int k = 0; k <= ens.n_steps; ++k) {
            int kc = std::min(k, ens.n_steps - 1);
            double x = ens.state(path, k);
            double u1 = ens.u1(path, kc);
            double u2 = ens.u2(path, kc);
            std::vector<std::string> cells = {
                std::to_string(path), std::to_string(k),
                dt::format_g17(ens.times[k]), dt::format_g17(x),
                dt::format_g17(u1), dt::format_g17(u2)};
            if (cfg.export_beliefs) {
                double z = dt::diffusion(x, p) > 0.0
                               ? dt::belief_update(x, cfg.x0, z0, u1, u2, p)
                               : std::numeric_limits<double>::quiet_NaN();
                cells.push_back(dt::format_g17(z));
            }
            csv.row(cells);
        }
    }
    return 0;
}

int cmd_solve_pic(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    auto prob = dt::incumbent_problem(cfg.market(), cfg.ckls(), cfg.time_grid(),
                                      cfg.state_grid(), cfg.control_grid(),
                                      entry_rule_from(cfg), cfg.epsilon);
    write_policy_csv(ctx, "pic_policy.csv", dt::backward_value(prob));
    return 0;
}

int cmd_solve_hjb(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    auto prob = dt::incumbent_problem(cfg.market(), cfg.ckls(), cfg.time_grid(),
                                      cfg.state_grid(), cfg.control_grid(),
                                      entry_rule_from(cfg), cfg.epsilon);
    write_policy_csv(ctx, "hjb_policy.csv", dt::solve_hjb_fd(prob, cfg.fd_scheme()));
    return 0;
}

int cmd_cross_validate(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    auto prob = dt::incumbent_problem(cfg.market(), cfg.ckls(), cfg.time_grid(),
                                      cfg.state_grid(), cfg.control_grid(),
                                      entry_rule_from(cfg), cfg.epsilon);
    auto pic = dt::backward_value(prob);
    auto hjb = dt::solve_hjb_fd(prob, cfg.fd_scheme());
    auto rep = dt::cross_validate(pic, hjb, cfg.cross_tol_value, cfg.cross_tol_policy);

    dt::CsvWriter csv(ctx.out("cross_validation.csv"), "metric,value,threshold,pass",
                      ctx.hash, cfg.seed);
    bool pass_value = rep.value_gap <= rep.tol_value;
    bool pass_policy = rep.policy_agreement >= rep.tol_policy_agreement;
    csv.row({"value_gap", dt::format_g17(rep.value_gap),
             dt::format_g17(rep.tol_value), pass_value ? "1" : "0"});
    csv.row({"policy_agreement", dt::format_g17(rep.policy_agreement),
             dt::format_g17(rep.tol_policy_agreement), pass_policy ? "1" : "0"});
    return 0;
}

int cmd_equilibrium(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    dt::EquilibriumOptions opts;
    opts.max_iter = cfg.max_iter;
    opts.tol = cfg.tol;
    opts.damping = cfg.damping;
    opts.epsilon = cfg.epsilon;
    opts.hazard = cfg.hazard;
    opts.n_paths = cfg.n_paths;
    opts.seed = cfg.seed;
    opts.threads = effective_threads(cfg);
    auto tg = cfg.time_grid();
    auto sg = cfg.state_grid();
    auto sol = dt::solve_equilibrium(cfg.market(), cfg.ckls(), tg, sg,
                                     cfg.control_grid(), cfg.x0, opts);

    dt::CsvWriter eq(ctx.out("equilibrium.csv"),
                     "time_index,time,entry_threshold,revelation_threshold,"
                     "u1_star_at_threshold",
                     ctx.hash, cfg.seed);
    for (int k = 0; k <= tg.n_steps; ++k) {
        double entry_thr = sol.entrant_entry_rule.threshold[k];
        double reveal_thr = sol.revelation_rule.threshold[k];
        double u1_star = sol.incumbent_policy.eval(k, std::isfinite(entry_thr)
                                                          ? entry_thr
                                                          : sg.nodes.back());
        eq.row({std::to_string(k), dt::format_g17(tg.time(k)),
                dt::format_g17(entry_thr), dt::format_g17(reveal_thr),
                dt::format_g17(u1_star)});
    }

    dt::CsvWriter diag(ctx.out("diagnostics.csv"),
                       "entry_prob,mean_entry_time,revelation_prob,"
                       "incumbent_payoff,entrant_payoff,residual,iterations",
                       ctx.hash, cfg.seed);
    diag.row({dt::format_g17(sol.diagnostics.entry_prob),
              dt::format_g17(sol.diagnostics.mean_entry_time),
              dt::format_g17(sol.diagnostics.revelation_prob),
              dt::format_g17(sol.diagnostics.incumbent_payoff),
              dt::format_g17(sol.diagnostics.entrant_payoff),
              dt::format_g17(sol.residual), std::to_string(sol.iterations)});
    return 0;
}

int cmd_evaluate(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    auto tg = cfg.time_grid();
    auto sg = cfg.state_grid();
    auto pol1 = dt::FeedbackPolicy::constant(tg, sg, cfg.u1_const);
    auto pol2 = dt::FeedbackPolicy::constant(tg, sg, cfg.u2_const);
    auto ens = dt::simulate_paths(cfg.ckls(), pol1, pol2, tg, cfg.x0, cfg.n_paths,
                                  cfg.seed, effective_threads(cfg));

    auto inc = dt::incumbent_payoff_mc(ens, reveal_rule_from(cfg), cfg.market(),
                                       cfg.ckls(), tg);
    auto type = cfg.entrant_type == "w" ? dt::IncumbentType::Weak
                                        : dt::IncumbentType::Strong;
    auto form = cfg.entrant_form == "flow" ? dt::EntrantForm::Flow
                                           : dt::EntrantForm::LumpSum;
    auto ent = dt::entrant_payoff_mc(ens, entry_rule_from(cfg), type, cfg.market(),
                                     cfg.ckls(), tg, form);

    dt::CsvWriter csv(ctx.out("payoffs.csv"), "quantity,estimate,std_error,n_paths,seed",
                      ctx.hash, cfg.seed);
    csv.row({"incumbent_payoff", dt::format_g17(inc.estimate),
             dt::format_g17(inc.std_error), std::to_string(inc.n_paths),
             std::to_string(inc.seed)});
    csv.row({"entrant_payoff", dt::format_g17(ent.estimate),
             dt::format_g17(ent.std_error), std::to_string(ent.n_paths),
             std::to_string(ent.seed)});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entry-deterrence solver and simulator for controlled CKLS demand"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::vector<std::string> overrides;

    const std::vector<std::pair<std::string, int (*)(const RunContext&)>> commands = {
        {"simulate", cmd_simulate},       {"solve-pic", cmd_solve_pic},
        {"solve-hjb", cmd_solve_hjb},     {"cross-validate", cmd_cross_validate},
        {"equilibrium", cmd_equilibrium}, {"evaluate", cmd_evaluate},
    };
    for (const auto& [name, fn] : commands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "scenario config file")->required();
        sub->add_option("--set", overrides, "override config key=value");
        sub->add_option("--out", out_dir, "output directory");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        RunContext ctx;
        ctx.cfg = dt::parse_config_file(config_path);
        for (const auto& kv : overrides) dt::apply_override(ctx.cfg, kv);
        ctx.cfg.validate();
        ctx.hash = ctx.cfg.hash();
        ctx.out_dir = out_dir;
        fs::create_directories(ctx.out_dir);

        for (const auto& [name, fn] : commands)
            if (app.get_subcommand(name)->parsed()) return fn(ctx);
        return 2;
    } catch (const dt::ConvergenceError& e) {
        std::cerr << "error: convergence: " << e.what()
                  << " (residual=" << e.residual << ", iterations=" << e.iterations
                  << ")" << std::endl;
        return 3;
    } catch (const dt::DivergenceError& e) {
        std::cerr << "error: divergence: " << e.what() << std::endl;
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: domain: " << e.what() << std::endl;
        return 2;
    }
}
