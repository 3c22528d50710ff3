#include "deterrence/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "deterrence/csv.hpp"

namespace deterrence {

namespace {

struct FieldSetter {
    std::function<void(ScenarioConfig&, const std::string&)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

double parse_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw DomainError("invalid numeric value for key '" + key + "': " + v);
    return d;
}

long long parse_int(const std::string& key, const std::string& v) {
    char* end = nullptr;
    long long i = std::strtoll(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw DomainError("invalid integer value for key '" + key + "': " + v);
    return i;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "0" || v == "false") return false;
    if (v == "1" || v == "true") return true;
    throw DomainError("invalid boolean value for key '" + key + "': " + v);
}

const std::map<std::string, FieldSetter>& field_table() {
    static const std::map<std::string, FieldSetter> table = [] {
        std::map<std::string, FieldSetter> t;
        auto dbl = [&t](const std::string& key, double ScenarioConfig::* f) {
            t[key] = {[key, f](ScenarioConfig& c, const std::string& v) {
                          c.*f = parse_double(key, v);
                      },
                      [f](const ScenarioConfig& c) { return format_g17(c.*f); }};
        };
        auto integer = [&t](const std::string& key, int ScenarioConfig::* f) {
            t[key] = {[key, f](ScenarioConfig& c, const std::string& v) {
                          c.*f = static_cast<int>(parse_int(key, v));
                      },
                      [f](const ScenarioConfig& c) { return std::to_string(c.*f); }};
        };
        auto boolean = [&t](const std::string& key, bool ScenarioConfig::* f) {
            t[key] = {[key, f](ScenarioConfig& c, const std::string& v) {
                          c.*f = parse_bool(key, v);
                      },
                      [f](const ScenarioConfig& c) { return c.*f ? "1" : "0"; }};
        };
        auto str = [&t](const std::string& key, std::string ScenarioConfig::* f) {
            t[key] = {[f](ScenarioConfig& c, const std::string& v) { c.*f = v; },
                      [f](const ScenarioConfig& c) { return c.*f; }};
        };
        dbl("alpha1", &ScenarioConfig::alpha1);
        dbl("alpha2", &ScenarioConfig::alpha2);
        dbl("alpha3", &ScenarioConfig::alpha3);
        dbl("alpha4", &ScenarioConfig::alpha4);
        dbl("theta1", &ScenarioConfig::theta1);
        dbl("theta2", &ScenarioConfig::theta2);
        dbl("q", &ScenarioConfig::q);
        dbl("m_w", &ScenarioConfig::m_w);
        dbl("d_i_w", &ScenarioConfig::d_i_w);
        dbl("d_e_w", &ScenarioConfig::d_e_w);
        dbl("f", &ScenarioConfig::f);
        dbl("gamma", &ScenarioConfig::gamma);
        dbl("u3_bar", &ScenarioConfig::u3_bar);
        dbl("p0", &ScenarioConfig::p0);
        dbl("x0", &ScenarioConfig::x0);
        dbl("t", &ScenarioConfig::t);
        integer("n_steps", &ScenarioConfig::n_steps);
        dbl("x_min", &ScenarioConfig::x_min);
        dbl("x_max", &ScenarioConfig::x_max);
        integer("n_nodes", &ScenarioConfig::n_nodes);
        boolean("log_spacing", &ScenarioConfig::log_spacing);
        dbl("u_min", &ScenarioConfig::u_min);
        dbl("u_max", &ScenarioConfig::u_max);
        integer("n_controls", &ScenarioConfig::n_controls);
        str("scheme", &ScenarioConfig::scheme);
        dbl("cfl_safety", &ScenarioConfig::cfl_safety);
        dbl("tol", &ScenarioConfig::tol);
        integer("max_iter", &ScenarioConfig::max_iter);
        dbl("damping", &ScenarioConfig::damping);
        dbl("epsilon", &ScenarioConfig::epsilon);
        dbl("hazard", &ScenarioConfig::hazard);
        str("entrant_form", &ScenarioConfig::entrant_form);
        str("entrant_type", &ScenarioConfig::entrant_type);
        dbl("entry_threshold", &ScenarioConfig::entry_threshold);
        dbl("reveal_threshold", &ScenarioConfig::reveal_threshold);
        dbl("u1_const", &ScenarioConfig::u1_const);
        dbl("u2_const", &ScenarioConfig::u2_const);
        dbl("cross_tol_value", &ScenarioConfig::cross_tol_value);
        dbl("cross_tol_policy", &ScenarioConfig::cross_tol_policy);
        integer("n_paths", &ScenarioConfig::n_paths);
        t["seed"] = {[](ScenarioConfig& c, const std::string& v) {
                         c.seed = static_cast<std::uint64_t>(parse_int("seed", v));
                     },
                     [](const ScenarioConfig& c) { return std::to_string(c.seed); }};
        integer("threads", &ScenarioConfig::threads);
        boolean("export_beliefs", &ScenarioConfig::export_beliefs);
        return t;
    }();
    return table;
}

void set_key(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    auto it = field_table().find(key);
    if (it == field_table().end())
        throw DomainError("unknown config key '" + key + "'");
    it->second.set(cfg, value);
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

CklsParams ScenarioConfig::ckls() const {
    return CklsParams{alpha1, alpha2, alpha3, alpha4, theta1, theta2};
}

MarketPrimitives ScenarioConfig::market() const {
    return MarketPrimitives{q, m_w, d_i_w, d_e_w, f, gamma, u3_bar, p0};
}

TimeGrid ScenarioConfig::time_grid() const { return TimeGrid{t, n_steps}; }

StateGrid ScenarioConfig::state_grid() const {
    return log_spacing ? StateGrid::log_uniform(x_min, x_max, n_nodes)
                       : StateGrid::uniform(x_min, x_max, n_nodes);
}

ControlGrid ScenarioConfig::control_grid() const {
    return ControlGrid::uniform(u_min, u_max, n_controls);
}

FdScheme ScenarioConfig::fd_scheme() const {
    FdScheme s;
    if (scheme == "explicit")
        s.time_stepping = FdScheme::TimeStepping::Explicit;
    else if (scheme == "implicit")
        s.time_stepping = FdScheme::TimeStepping::Implicit;
    else
        throw DomainError("scheme must be 'explicit' or 'implicit'");
    s.cfl_safety = cfl_safety;
    return s;
}

void ScenarioConfig::validate() const {
    validate_params(ckls());
    check_assumptions(market());
    validate_grid(time_grid());
    validate_state_grid(state_grid());
    validate_control_grid(control_grid());
    fd_scheme();
    if (!(x0 > 0.0)) throw DomainError("x0 must be positive");
    if (n_paths < 1) throw DomainError("n_paths must be >= 1");
    if (hazard < 0.0) throw DomainError("hazard must be >= 0");
    if (entrant_form != "flow" && entrant_form != "lump")
        throw DomainError("entrant_form must be 'flow' or 'lump'");
    if (entrant_type != "w" && entrant_type != "q")
        throw DomainError("entrant_type must be 'w' or 'q'");
}

std::string ScenarioConfig::serialize() const {
    std::ostringstream out;
    for (const auto& [key, field] : field_table())
        out << key << "=" << field.get(*this) << "\n";
    return out.str();
}

std::uint64_t ScenarioConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : serialize()) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

ScenarioConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot read config file: " + path);
    ScenarioConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw DomainError("malformed config line " + std::to_string(lineno) +
                              " (expected key = value)");
        set_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void apply_override(ScenarioConfig& cfg, const std::string& key_value) {
    std::size_t eq = key_value.find('=');
    if (eq == std::string::npos)
        throw DomainError("override must have the form key=value: " + key_value);
    set_key(cfg, trim(key_value.substr(0, eq)), trim(key_value.substr(eq + 1)));
}

} // namespace deterrence
