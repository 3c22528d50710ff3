#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "deterrence/equilibrium.hpp"
#include "deterrence/hjb.hpp"

namespace deterrence {

/// Flat key-value scenario configuration. Keys are the field names below;
/// unknown keys are rejected.
struct ScenarioConfig {
    // CKLS parameters
    double alpha1 = 0.5;
    double alpha2 = -1.0;
    double alpha3 = 0.3;
    double alpha4 = 0.5;
    double theta1 = 0.0;
    double theta2 = 0.0;

    // market primitives
    double q = 1.0;
    double m_w = 1.5;
    double d_i_w = 0.4;
    double d_e_w = 0.5;
    double f = 0.2;
    double gamma = 1.0;
    double u3_bar = 0.0;
    double p0 = 0.5;

    // grids
    double x0 = 1.0;
    double t = 1.0;
    int n_steps = 40;
    double x_min = 0.2;
    double x_max = 3.0;
    int n_nodes = 80;
    bool log_spacing = false;
    double u_min = 0.0;
    double u_max = 1.0;
    int n_controls = 5;

    // solver settings
    std::string scheme = "implicit"; // or "explicit"
    double cfl_safety = 0.9;
    double tol = 1e-6;
    int max_iter = 50;
    double damping = 1.0;
    double epsilon = 0.0;
    double hazard = 0.0;
    std::string entrant_form = "flow"; // or "lump"
    std::string entrant_type = "w";    // or "q"

    // fixed rules and controls for the simulate/evaluate subcommands
    double entry_threshold = std::numeric_limits<double>::infinity();
    double reveal_threshold = -std::numeric_limits<double>::infinity();
    double u1_const = 0.0;
    double u2_const = 0.0;

    // cross-validation tolerances
    double cross_tol_value = 0.05;
    double cross_tol_policy = 0.95;

    // run settings
    int n_paths = 10000;
    std::uint64_t seed = 42;
    int threads = 0;
    bool export_beliefs = false;

    CklsParams ckls() const;
    MarketPrimitives market() const;
    TimeGrid time_grid() const;
    StateGrid state_grid() const;
    ControlGrid control_grid() const;
    FdScheme fd_scheme() const;

    /// Validates parameters, market assumptions, and grid settings.
    void validate() const;

    /// FNV-1a hash of the canonical key=value serialization.
    std::uint64_t hash() const;

    std::string serialize() const;
};

/// Parses the documented key=value text format ('#' starts a comment).
/// Throws DomainError on unknown keys or malformed lines.
ScenarioConfig parse_config_file(const std::string& path);

/// Applies "key=value" overrides on top of a parsed config.
void apply_override(ScenarioConfig& cfg, const std::string& key_value);

} // namespace deterrence
