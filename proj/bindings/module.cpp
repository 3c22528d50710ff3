#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "deterrence/beliefs.hpp"
#include "deterrence/config.hpp"
#include "deterrence/equilibrium.hpp"
#include "deterrence/hjb.hpp"
#include "deterrence/paths.hpp"
#include "deterrence/pic.hpp"

namespace py = pybind11;
using namespace deterrence;

PYBIND11_MODULE(_deterrence, m) {
    m.doc() = "Entry-deterrence game solver on controlled CKLS demand";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);
    py::register_exception<ResolutionError>(m, "ResolutionError", PyExc_ValueError);
    py::register_exception<CflError>(m, "CflError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
    py::register_exception<GridMismatchError>(m, "GridMismatchError", PyExc_ValueError);

    py::class_<CklsParams>(m, "CklsParams")
        .def(py::init<double, double, double, double, double, double>(),
             py::arg("alpha1") = 0.0, py::arg("alpha2") = 0.0,
             py::arg("alpha3") = 0.0, py::arg("alpha4") = 0.5,
             py::arg("theta1") = 0.0, py::arg("theta2") = 0.0)
        .def_readwrite("alpha1", &CklsParams::alpha1)
        .def_readwrite("alpha2", &CklsParams::alpha2)
        .def_readwrite("alpha3", &CklsParams::alpha3)
        .def_readwrite("alpha4", &CklsParams::alpha4)
        .def_readwrite("theta1", &CklsParams::theta1)
        .def_readwrite("theta2", &CklsParams::theta2);

    py::class_<TimeGrid>(m, "TimeGrid")
        .def(py::init<double, int>(), py::arg("horizon"), py::arg("n_steps"))
        .def_readonly("horizon", &TimeGrid::horizon)
        .def_readonly("n_steps", &TimeGrid::n_steps)
        .def("dt", &TimeGrid::dt)
        .def("time", &TimeGrid::time);

    py::class_<StateGrid>(m, "StateGrid")
        .def_static("uniform", &StateGrid::uniform)
        .def_static("log_uniform", &StateGrid::log_uniform)
        .def_readonly("nodes", &StateGrid::nodes)
        .def("nearest", &StateGrid::nearest);

    py::class_<ControlGrid>(m, "ControlGrid")
        .def_static("uniform", &ControlGrid::uniform)
        .def_readonly("levels", &ControlGrid::levels);

    py::class_<MarketPrimitives>(m, "MarketPrimitives")
        .def(py::init<>())
        .def_readwrite("q", &MarketPrimitives::q)
        .def_readwrite("m_w", &MarketPrimitives::m_w)
        .def_readwrite("d_i_w", &MarketPrimitives::d_i_w)
        .def_readwrite("d_e_w", &MarketPrimitives::d_e_w)
        .def_readwrite("f", &MarketPrimitives::f)
        .def_readwrite("gamma", &MarketPrimitives::gamma)
        .def_readwrite("u3_bar", &MarketPrimitives::u3_bar)
        .def_readwrite("p0", &MarketPrimitives::p0);

    py::class_<PathEnsemble>(m, "PathEnsemble")
        .def_readonly("times", &PathEnsemble::times)
        .def_readonly("n_paths", &PathEnsemble::n_paths)
        .def_readonly("n_steps", &PathEnsemble::n_steps)
        .def_readonly("seed", &PathEnsemble::seed)
        .def("state", &PathEnsemble::state)
        .def("u1", &PathEnsemble::u1)
        .def("u2", &PathEnsemble::u2);

    py::class_<FeedbackPolicy>(m, "FeedbackPolicy")
        .def_static("constant", &FeedbackPolicy::constant)
        .def("at", py::overload_cast<int, int>(&FeedbackPolicy::at, py::const_))
        .def("eval", &FeedbackPolicy::eval)
        .def_readonly("controls", &FeedbackPolicy::controls);

    py::class_<ValueSurface>(m, "ValueSurface")
        .def("at", py::overload_cast<int, int>(&ValueSurface::at, py::const_))
        .def_readonly("values", &ValueSurface::values);

    py::class_<StoppingRule> rule(m, "StoppingRule");
    rule.def_static("never", &StoppingRule::never)
        .def_static("above", &StoppingRule::above, py::arg("threshold"),
                    py::arg("hazard") = 0.0)
        .def_static("below", &StoppingRule::below, py::arg("threshold"),
                    py::arg("hazard") = 0.0)
        .def_readonly("threshold", &StoppingRule::threshold)
        .def_readonly("hazard", &StoppingRule::hazard)
        .def("triggered", &StoppingRule::triggered);

    py::enum_<IncumbentType>(m, "IncumbentType")
        .value("Strong", IncumbentType::Strong)
        .value("Weak", IncumbentType::Weak);

    py::enum_<EntrantForm>(m, "EntrantForm")
        .value("LumpSum", EntrantForm::LumpSum)
        .value("Flow", EntrantForm::Flow);

    py::class_<McEstimate>(m, "McEstimate")
        .def_readonly("estimate", &McEstimate::estimate)
        .def_readonly("std_error", &McEstimate::std_error)
        .def_readonly("n_paths", &McEstimate::n_paths)
        .def_readonly("seed", &McEstimate::seed);

    py::class_<SolveResult>(m, "SolveResult")
        .def_readonly("value", &SolveResult::value)
        .def_readonly("policy", &SolveResult::policy);

    py::class_<FdScheme> scheme(m, "FdScheme");
    py::enum_<FdScheme::TimeStepping>(scheme, "TimeStepping")
        .value("Explicit", FdScheme::TimeStepping::Explicit)
        .value("Implicit", FdScheme::TimeStepping::Implicit);
    scheme.def(py::init<>())
        .def_readwrite("time_stepping", &FdScheme::time_stepping)
        .def_readwrite("cfl_safety", &FdScheme::cfl_safety);

    py::class_<CrossValidationReport>(m, "CrossValidationReport")
        .def_readonly("value_gap", &CrossValidationReport::value_gap)
        .def_readonly("policy_agreement", &CrossValidationReport::policy_agreement)
        .def_readonly("pass_", &CrossValidationReport::pass);

    py::class_<EquilibriumDiagnostics>(m, "EquilibriumDiagnostics")
        .def_readonly("entry_prob", &EquilibriumDiagnostics::entry_prob)
        .def_readonly("mean_entry_time", &EquilibriumDiagnostics::mean_entry_time)
        .def_readonly("revelation_prob", &EquilibriumDiagnostics::revelation_prob)
        .def_readonly("incumbent_payoff", &EquilibriumDiagnostics::incumbent_payoff)
        .def_readonly("entrant_payoff", &EquilibriumDiagnostics::entrant_payoff);

    py::class_<EquilibriumOptions>(m, "EquilibriumOptions")
        .def(py::init<>())
        .def_readwrite("max_iter", &EquilibriumOptions::max_iter)
        .def_readwrite("tol", &EquilibriumOptions::tol)
        .def_readwrite("damping", &EquilibriumOptions::damping)
        .def_readwrite("epsilon", &EquilibriumOptions::epsilon)
        .def_readwrite("hazard", &EquilibriumOptions::hazard)
        .def_readwrite("n_paths", &EquilibriumOptions::n_paths)
        .def_readwrite("seed", &EquilibriumOptions::seed)
        .def_readwrite("threads", &EquilibriumOptions::threads);

    py::class_<EntrantResponse>(m, "EntrantResponse")
        .def_readonly("entry_rule", &EntrantResponse::entry_rule)
        .def_readonly("post_entry_policy", &EntrantResponse::post_entry_policy)
        .def_readonly("entry_value", &EntrantResponse::entry_value)
        .def_readonly("threshold_structure", &EntrantResponse::threshold_structure);

    py::class_<IncumbentResponse>(m, "IncumbentResponse")
        .def_readonly("policy", &IncumbentResponse::policy)
        .def_readonly("revelation_rule", &IncumbentResponse::revelation_rule)
        .def_readonly("value", &IncumbentResponse::value)
        .def_readonly("threshold_structure", &IncumbentResponse::threshold_structure);

    py::class_<EquilibriumSolution>(m, "EquilibriumSolution")
        .def_readonly("incumbent_policy", &EquilibriumSolution::incumbent_policy)
        .def_readonly("revelation_rule", &EquilibriumSolution::revelation_rule)
        .def_readonly("entrant_entry_rule", &EquilibriumSolution::entrant_entry_rule)
        .def_readonly("entrant_post_entry_policy",
                      &EquilibriumSolution::entrant_post_entry_policy)
        .def_readonly("residual", &EquilibriumSolution::residual)
        .def_readonly("iterations", &EquilibriumSolution::iterations)
        .def_readonly("diagnostics", &EquilibriumSolution::diagnostics);

    m.def("validate_params", &validate_params);
    m.def("build_partition", &build_partition);
    m.def("drift", &drift);
    m.def("diffusion", &diffusion);
    m.def("step_euler", &step_euler);
    m.def("simulate_paths", &simulate_paths, py::arg("params"), py::arg("policy1"),
          py::arg("policy2"), py::arg("grid"), py::arg("x0"), py::arg("n_paths"),
          py::arg("seed"), py::arg("threads") = 0);

    m.def("logit", &logit);
    m.def("posterior_prob", &posterior_prob);
    m.def("belief_update", &belief_update);

    m.def("check_assumptions", &check_assumptions);
    m.def("check_discount_bound", &check_discount_bound);
    m.def("continuation_value", &continuation_value);
    m.def("incumbent_payoff_mc", &incumbent_payoff_mc);
    m.def("entrant_payoff_mc", &entrant_payoff_mc, py::arg("ensemble"),
          py::arg("entry_rule"), py::arg("theta"), py::arg("market"),
          py::arg("params"), py::arg("grid"), py::arg("form") = EntrantForm::Flow);

    m.def("lagrangian_increment", &lagrangian_increment);
    m.def("kernel_weights", &kernel_weights);
    m.def("backward_value",
          py::overload_cast<const TimeGrid&, const StateGrid&,
                            const std::vector<double>&,
                            const std::function<double(double, double)>&,
                            const ControlGrid&, const MarketPrimitives&,
                            const CklsParams&>(&backward_value));
    m.def("solve_incumbent", &solve_incumbent, py::arg("market"), py::arg("params"),
          py::arg("time_grid"), py::arg("state_grid"), py::arg("control_grid"),
          py::arg("entrant_rule"), py::arg("epsilon") = 0.0);

    m.def("solve_hjb_incumbent",
          [](const MarketPrimitives& mk, const CklsParams& p, const TimeGrid& tg,
             const StateGrid& sg, const ControlGrid& cg, const StoppingRule& rule,
             const FdScheme& scheme, double epsilon) {
              return solve_hjb_fd(incumbent_problem(mk, p, tg, sg, cg, rule, epsilon),
                                  scheme);
          },
          py::arg("market"), py::arg("params"), py::arg("time_grid"),
          py::arg("state_grid"), py::arg("control_grid"), py::arg("entrant_rule"),
          py::arg("scheme") = FdScheme{}, py::arg("epsilon") = 0.0);
    m.def("cross_validate", &cross_validate);

    m.def("apply_mixing", &apply_mixing);
    m.def("entrant_best_response", &entrant_best_response);
    m.def("incumbent_best_response", &incumbent_best_response,
          py::arg("entry_rule"), py::arg("market"), py::arg("params"),
          py::arg("time_grid"), py::arg("state_grid"), py::arg("control_grid"),
          py::arg("epsilon") = 0.0);
    m.def("solve_equilibrium", &solve_equilibrium, py::arg("market"),
          py::arg("params"), py::arg("time_grid"), py::arg("state_grid"),
          py::arg("control_grid"), py::arg("x0"),
          py::arg("options") = EquilibriumOptions{});
}
