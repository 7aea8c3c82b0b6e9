#ifndef SEIRCTL_CONFIG_HPP
#define SEIRCTL_CONFIG_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "seirctl/errors.hpp"
#include "seirctl/model.hpp"

namespace seirctl {

/**
 * @brief Run configuration: flat key = value file, '#' comments, unknown keys
 * rejected.
 */
struct RunConfig {
    std::string region = "US";
    std::string confirmed_csv;
    std::string deaths_csv;
    std::string population_csv;
    double stride = 2.0;
    std::vector<double> windows; ///< empty => single window over the whole series
    int substeps = 10;
    ParamBounds bounds = ParamBounds::covid_defaults();
    double tau = 1e-6;
    double tau_beta_scale = 100.0;
    double tau_epsilon_scale = 1.0;
    double tau_gamma_scale = 1.0;
    double tau_mu_scale = 0.01;
    std::optional<double> lambda1; ///< empty => 1/max^2 normalization per window
    std::optional<double> lambda2;
    double tol = 1e-4;
    std::size_t max_iters = 5000;
    std::string out_dir = "out";
    unsigned seed = 0;
    ParamVec theta0{0.5, 0.2, 0.1, 0.0}; ///< rough prior; mu comes from the data rule
    double horizon_days = 0.0;           ///< series truncation for fit (0 => use all data)
    double control_start = 0.0;          ///< state anchor time for the control command

    // simulate command inputs
    ParamVec sim_theta{0.5, 0.2, 0.1, 0.01};
    StateVec sim_u0{990.0, 0.0, 10.0, 0.0, 0.0};
    double sim_days = 100.0;

    ParamVec tau_vector() const
    {
        return ParamVec{tau * tau_beta_scale, tau * tau_epsilon_scale, tau * tau_gamma_scale,
                        tau * tau_mu_scale};
    }
};

namespace detail {

inline std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

inline double to_number(const std::string& key, const std::string& value)
{
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != value.size() || value.empty())
        throw ConfigError("config: key '" + key + "' needs a number, got '" + value + "'");
    return out;
}

} // namespace detail

inline RunConfig parse_config(std::istream& in, const std::string& label = "config")
{
    RunConfig cfg;
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(label + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (!kv.emplace(key, value).second)
            throw ConfigError(label + ": duplicate key '" + key + "'");
    }

    const auto num = [&](const char* key, double& slot) {
        if (auto it = kv.find(key); it != kv.end()) slot = detail::to_number(key, it->second);
    };
    const auto str = [&](const char* key, std::string& slot) {
        if (auto it = kv.find(key); it != kv.end()) slot = it->second;
    };

    static const std::set<std::string> known = {
        "region", "confirmed_csv", "deaths_csv", "population_csv", "stride", "windows",
        "substeps", "beta_min", "beta_max", "epsilon_min", "epsilon_max", "gamma_min",
        "gamma_max", "mu_min", "mu_max", "tau", "tau_beta_scale", "tau_epsilon_scale",
        "tau_gamma_scale", "tau_mu_scale", "lambda1", "lambda2", "tol", "max_iters", "out_dir",
        "seed", "theta0_beta", "theta0_epsilon", "theta0_gamma", "horizon_days", "control_start",
        "sim_beta", "sim_epsilon", "sim_gamma", "sim_mu", "sim_S", "sim_E", "sim_I", "sim_R",
        "sim_D", "sim_days"};
    for (const auto& [key, value] : kv)
        if (!known.count(key)) throw ConfigError(label + ": unknown key '" + key + "'");

    str("region", cfg.region);
    str("confirmed_csv", cfg.confirmed_csv);
    str("deaths_csv", cfg.deaths_csv);
    str("population_csv", cfg.population_csv);
    str("out_dir", cfg.out_dir);
    num("stride", cfg.stride);
    num("tau", cfg.tau);
    num("tau_beta_scale", cfg.tau_beta_scale);
    num("tau_epsilon_scale", cfg.tau_epsilon_scale);
    num("tau_gamma_scale", cfg.tau_gamma_scale);
    num("tau_mu_scale", cfg.tau_mu_scale);
    num("tol", cfg.tol);
    num("horizon_days", cfg.horizon_days);
    num("control_start", cfg.control_start);
    num("beta_min", cfg.bounds.lower.beta);
    num("beta_max", cfg.bounds.upper.beta);
    num("epsilon_min", cfg.bounds.lower.epsilon);
    num("epsilon_max", cfg.bounds.upper.epsilon);
    num("gamma_min", cfg.bounds.lower.gamma);
    num("gamma_max", cfg.bounds.upper.gamma);
    num("mu_min", cfg.bounds.lower.mu);
    num("mu_max", cfg.bounds.upper.mu);
    num("theta0_beta", cfg.theta0.beta);
    num("theta0_epsilon", cfg.theta0.epsilon);
    num("theta0_gamma", cfg.theta0.gamma);
    num("sim_beta", cfg.sim_theta.beta);
    num("sim_epsilon", cfg.sim_theta.epsilon);
    num("sim_gamma", cfg.sim_theta.gamma);
    num("sim_mu", cfg.sim_theta.mu);
    num("sim_S", cfg.sim_u0.S);
    num("sim_E", cfg.sim_u0.E);
    num("sim_I", cfg.sim_u0.I);
    num("sim_R", cfg.sim_u0.R);
    num("sim_D", cfg.sim_u0.D);
    num("sim_days", cfg.sim_days);

    if (auto it = kv.find("substeps"); it != kv.end()) {
        const double m = detail::to_number("substeps", it->second);
        if (m < 1.0 || m != static_cast<int>(m))
            throw ConfigError("config: substeps must be a positive integer");
        cfg.substeps = static_cast<int>(m);
    }
    if (auto it = kv.find("max_iters"); it != kv.end()) {
        const double n = detail::to_number("max_iters", it->second);
        if (n < 1.0) throw ConfigError("config: max_iters must be >= 1");
        cfg.max_iters = static_cast<std::size_t>(n);
    }
    if (auto it = kv.find("seed"); it != kv.end())
        cfg.seed = static_cast<unsigned>(detail::to_number("seed", it->second));
    if (auto it = kv.find("windows"); it != kv.end() && !detail::trim(it->second).empty()) {
        std::istringstream ws(it->second);
        std::string tok;
        while (std::getline(ws, tok, ','))
            cfg.windows.push_back(detail::to_number("windows", detail::trim(tok)));
    }
    const auto opt_num = [&](const char* key, std::optional<double>& slot) {
        if (auto it = kv.find(key); it != kv.end() && it->second != "auto")
            slot = detail::to_number(key, it->second);
    };
    opt_num("lambda1", cfg.lambda1);
    opt_num("lambda2", cfg.lambda2);

    cfg.bounds.validate();
    if (!(cfg.tau > 0.0)) throw ConfigError("config: tau must be positive");
    if (!(cfg.tol > 0.0)) throw ConfigError("config: tol must be positive");
    if (cfg.stride < 1.0) throw ConfigError("config: stride must be >= 1");
    return cfg;
}

inline RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    RunConfig cfg = parse_config(in, path);
    for (const std::string* file : {&cfg.confirmed_csv, &cfg.deaths_csv, &cfg.population_csv}) {
        if (!file->empty() && !std::filesystem::exists(*file))
            throw ConfigError("config: referenced file '" + *file + "' does not exist");
    }
    return cfg;
}

} // namespace seirctl

#endif // SEIRCTL_CONFIG_HPP
