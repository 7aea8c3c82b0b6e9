#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "seirctl/workflows.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string region;
    std::string out_dir;
    unsigned seed = 0;
    bool seed_given = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags)
{
    cmd->add_option("--config", flags.config_path, "run configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--region", flags.region, "override the configured region");
    cmd->add_option("--out", flags.out_dir, "override the configured output directory");
    cmd->add_option("--seed", flags.seed, "override the configured random seed")
        ->each([&flags](const std::string&) { flags.seed_given = true; });
}

seirctl::RunConfig make_config(const CommonFlags& flags)
{
    seirctl::RunConfig cfg = seirctl::load_config(flags.config_path);
    if (!flags.region.empty()) cfg.region = flags.region;
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (flags.seed_given) cfg.seed = flags.seed;
    return cfg;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"SEIR(D) epidemic parameter learning, forecasting and scheduled control"};
    app.require_subcommand(1);

    CommonFlags fit_flags, predict_flags, control_flags, simulate_flags;
    double horizon = 14.0;
    std::string schedule_path;

    CLI::App* fit_cmd = app.add_subcommand("fit", "learn time-varying parameters from reported data");
    add_common(fit_cmd, fit_flags);

    CLI::App* predict_cmd =
        app.add_subcommand("predict", "extend a completed fit with the end-time parameters");
    add_common(predict_cmd, predict_flags);
    predict_cmd->add_option("--horizon", horizon, "forecast horizon in days")->check(CLI::NonNegativeNumber);

    CLI::App* control_cmd =
        app.add_subcommand("control", "learn parameters that follow a scheduled (I, D) path");
    add_common(control_cmd, control_flags);
    control_cmd->add_option("--schedule", schedule_path, "schedule CSV with header t,I_d,D_d")
        ->required()
        ->check(CLI::ExistingFile);

    CLI::App* simulate_cmd =
        app.add_subcommand("simulate", "run the model under a constant parameter vector");
    add_common(simulate_cmd, simulate_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit_cmd->parsed()) return seirctl::cmd_fit(make_config(fit_flags));
        if (predict_cmd->parsed()) return seirctl::cmd_predict(make_config(predict_flags), horizon);
        if (control_cmd->parsed())
            return seirctl::cmd_control(make_config(control_flags), schedule_path);
        if (simulate_cmd->parsed()) return seirctl::cmd_simulate(make_config(simulate_flags));
    } catch (const seirctl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return seirctl::kExitConfig;
    } catch (const seirctl::DomainError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return seirctl::kExitConfig;
    } catch (const seirctl::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return seirctl::kExitData;
    } catch (const seirctl::DivergenceError& e) {
        std::cerr << "solver diverged: " << e.what() << '\n';
        return seirctl::kExitNoConverge;
    } catch (const seirctl::UnreachableTargetError& e) {
        std::cerr << "unreachable target: " << e.what() << '\n';
        return seirctl::kExitUnreachable;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
