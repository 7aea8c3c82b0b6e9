#ifndef SEIRCTL_WORKFLOWS_HPP
#define SEIRCTL_WORKFLOWS_HPP

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "seirctl/config.hpp"
#include "seirctl/control.hpp"
#include "seirctl/data.hpp"
#include "seirctl/errors.hpp"
#include "seirctl/simulate.hpp"

namespace seirctl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNoConverge = 4;
inline constexpr int kExitUnreachable = 5;

namespace detail {

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::ofstream open_out(const std::filesystem::path& path)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << std::setprecision(17);
    return out;
}

inline double lookup_population(const std::string& path, const std::string& region)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open population table '" + path + "'");
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        const auto fields = split_csv_line(line);
        if (fields.size() < 2) continue;
        if (row == 1 && fields[0] == "region") continue;
        if (fields[0] != region) continue;
        try {
            return std::stod(fields[1]);
        } catch (const std::exception&) {
            throw DataError(path + ": non-numeric population for region '" + region + "'");
        }
    }
    throw DataError(path + ": region '" + region + "' not found");
}

/// Numeric table with a header line; all body cells must parse as doubles.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const
    {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (header[c] == name) return static_cast<int>(c);
        return -1;
    }
};

inline Table read_table(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    Table table;
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    table.header = split_csv_line(line);
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (detail::trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != table.header.size())
            throw DataError(path + ": row " + std::to_string(row) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(table.header.size()));
        std::vector<double> values(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            try {
                values[c] = std::stod(fields[c]);
            } catch (const std::exception&) {
                throw DataError(path + ": non-numeric cell at row " + std::to_string(row) +
                                ", column " + std::to_string(c + 1));
            }
        }
        table.rows.push_back(std::move(values));
    }
    if (table.rows.empty()) throw DataError(path + ": no data rows");
    return table;
}

inline void write_theta_csv(const std::filesystem::path& path, const SolverGrid& grid,
                            const ParamTrajectory& theta)
{
    auto out = open_out(path);
    out << "t,beta,epsilon,gamma,mu,R0\n";
    for (std::size_t at = 0; at < theta.size(); ++at) {
        const ParamVec& p = theta[at];
        const double denom = p.gamma + p.mu;
        const double reproduction =
            denom > 0.0 ? p.beta / denom : std::numeric_limits<double>::infinity();
        out << grid.node_time(at) << ',' << p.beta << ',' << p.epsilon << ',' << p.gamma << ','
            << p.mu << ',' << reproduction << '\n';
    }
}

inline void write_trajectory_csv(const std::filesystem::path& path, const StateTrajectory& traj)
{
    auto out = open_out(path);
    out << "t,S,E,I,R,D\n";
    for (std::size_t at = 0; at < traj.values.size(); ++at) {
        const StateVec& u = traj.values[at];
        out << traj.grid.node_time(at) << ',' << u.S << ',' << u.E << ',' << u.I << ',' << u.R
            << ',' << u.D << '\n';
    }
}

struct MisfitRow {
    double t;
    double i_rel;
    double d_rel;
};

inline std::vector<MisfitRow> observation_misfits(const StateTrajectory& traj,
                                                  const ObservedSeries& sampled)
{
    // sampled carries the full data axis including day 0; misfits are reported
    // for every observation after day 0.
    std::vector<MisfitRow> rows;
    for (std::size_t i = 1; i < sampled.size(); ++i) {
        const StateVec& u = traj.at_obs(i);
        rows.push_back(MisfitRow{
            sampled.times[i],
            std::abs(u.I - sampled.confirmed[i]) / std::max(sampled.confirmed[i], 1.0),
            std::abs(u.D - sampled.deaths[i]) / std::max(sampled.deaths[i], 1.0)});
    }
    return rows;
}

inline void write_pair_csv(const std::filesystem::path& path, const ObservedSeries& sampled,
                           const StateTrajectory& traj, bool deaths)
{
    auto out = open_out(path);
    out << "t,reported,fitted\n";
    for (std::size_t i = 0; i < sampled.size(); ++i) {
        const StateVec& u = traj.at_obs(i);
        out << sampled.times[i] << ',' << (deaths ? sampled.deaths[i] : sampled.confirmed[i]) << ','
            << (deaths ? u.D : u.I) << '\n';
    }
}

inline ObservedSeries load_region_series(const RunConfig& cfg)
{
    if (cfg.confirmed_csv.empty() || cfg.deaths_csv.empty() || cfg.population_csv.empty())
        throw ConfigError("config: confirmed_csv, deaths_csv and population_csv are required");
    ObservedSeries series = parse_csse(read_file(cfg.confirmed_csv), read_file(cfg.deaths_csv),
                                       cfg.region);
    series.population = lookup_population(cfg.population_csv, cfg.region);
    if (cfg.horizon_days > 0.0) {
        while (!series.times.empty() && series.times.back() > cfg.horizon_days + 1e-9) {
            series.times.pop_back();
            series.confirmed.pop_back();
            series.deaths.pop_back();
        }
        if (series.size() < 2)
            throw ConfigError("config: horizon_days leaves fewer than two data points");
    }
    return series;
}

} // namespace detail

/**
 * @brief fit: ingest the region series, run the windowed optimal-control fit,
 * write theta/trajectory/report/plot files. Returns a nonzero exit code when
 * any window failed to converge (files are still written).
 */
inline int cmd_fit(const RunConfig& cfg)
{
    const ObservedSeries series = detail::load_region_series(cfg);
    const ObservedSeries sampled = sample_observations(series, cfg.stride);

    ControlProblem whole;
    whole.grid.times = sampled.times;
    whole.grid.substeps = cfg.substeps;
    whole.u0 = initial_state(sampled);
    whole.observed.region = sampled.region;
    whole.observed.population = sampled.population;
    whole.observed.times.assign(sampled.times.begin() + 1, sampled.times.end() - 1);
    whole.observed.confirmed.assign(sampled.confirmed.begin() + 1, sampled.confirmed.end() - 1);
    whole.observed.deaths.assign(sampled.deaths.begin() + 1, sampled.deaths.end() - 1);
    whole.target = TargetPoint{sampled.times.back(), sampled.confirmed.back(), sampled.deaths.back()};
    whole.bounds = cfg.bounds;
    whole.tau = cfg.tau_vector();
    whole.tol = cfg.tol;
    whole.max_iters = cfg.max_iters;

    WeightPolicy policy = WeightPolicy::per_window;
    if (cfg.lambda1 && cfg.lambda2) {
        whole.weights = LossWeights{*cfg.lambda1, *cfg.lambda2};
        policy = WeightPolicy::fixed;
    } else {
        whole.weights = LossWeights::normalized(whole.observed, whole.target);
    }

    std::vector<double> bounds_t = cfg.windows;
    if (bounds_t.empty()) bounds_t = {sampled.times.front(), sampled.times.back()};

    const WindowedFitResult wf = windowed_fit(whole, bounds_t, cfg.theta0, policy);

    const std::filesystem::path out(cfg.out_dir);
    detail::write_theta_csv(out / "theta.csv", whole.grid, wf.theta);
    detail::write_trajectory_csv(out / "trajectory.csv", wf.trajectory);
    detail::write_pair_csv(out / "plots" / "infections.csv", sampled, wf.trajectory, false);
    detail::write_pair_csv(out / "plots" / "deaths.csv", sampled, wf.trajectory, true);
    {
        auto series_out = detail::open_out(out / "series.csv");
        export_series_csv(sampled, series_out);
    }

    nlohmann::json report;
    report["region"] = cfg.region;
    report["stride"] = cfg.stride;
    report["substeps"] = cfg.substeps;
    report["monotone_repairs"] = series.monotone_repairs;
    report["loss_history"] = nlohmann::json::array();
    report["iterations"] = nlohmann::json::array();
    report["converged"] = nlohmann::json::array();
    report["windows"] = nlohmann::json::array();
    for (const WindowReport& w : wf.windows) {
        report["loss_history"].push_back(w.loss_history);
        report["iterations"].push_back(w.iterations);
        report["converged"].push_back(w.converged);
        report["windows"].push_back({{"t_begin", w.t_begin},
                                     {"t_end", w.t_end},
                                     {"iterations", w.iterations},
                                     {"converged", w.converged},
                                     {"rough_restart", w.rough_restart},
                                     {"final_loss", w.loss_history.back()}});
    }
    report["misfit"] = nlohmann::json::array();
    for (const auto& m : detail::observation_misfits(wf.trajectory, sampled))
        report["misfit"].push_back({{"t", m.t}, {"I_rel", m.i_rel}, {"D_rel", m.d_rel}});
    report["all_converged"] = wf.all_converged();
    {
        auto out_json = detail::open_out(out / "fit_report.json");
        out_json << report.dump(2) << '\n';
    }

    if (!wf.all_converged()) {
        std::cerr << "fit: one or more windows did not converge (see fit_report.json)\n";
        return kExitNoConverge;
    }
    return kExitOk;
}

/**
 * @brief predict: hold theta at its fitted end value and run the forward
 * solver for `horizon` further days from the fitted end state.
 */
inline int cmd_predict(const RunConfig& cfg, double horizon)
{
    if (horizon < 0.0) throw ConfigError("predict: horizon must be >= 0");
    const std::filesystem::path out(cfg.out_dir);
    const auto theta_path = out / "theta.csv";
    const auto traj_path = out / "trajectory.csv";
    if (!std::filesystem::exists(theta_path) || !std::filesystem::exists(traj_path))
        throw ConfigError("predict: missing fit artifacts in '" + cfg.out_dir +
                          "' (run fit first)");

    const detail::Table theta_table = detail::read_table(theta_path.string());
    const detail::Table traj_table = detail::read_table(traj_path.string());
    const auto& traj_last = traj_table.rows.back();
    const auto& theta_last = theta_table.rows.back();
    const double t_end = traj_last[0];
    const StateVec u_end{traj_last[1], traj_last[2], traj_last[3], traj_last[4], traj_last[5]};
    const ParamVec theta_end{theta_last[1], theta_last[2], theta_last[3], theta_last[4]};

    auto fout = detail::open_out(out / "forecast.csv");
    fout << "t,S,E,I,R,D\n";
    const auto row = [&](double t, const StateVec& u) {
        fout << t << ',' << u.S << ',' << u.E << ',' << u.I << ',' << u.R << ',' << u.D << '\n';
    };
    if (horizon == 0.0) {
        row(t_end, u_end);
        return kExitOk;
    }

    SolverGrid grid;
    grid.substeps = cfg.substeps;
    for (double t = t_end; t < t_end + horizon - 1e-9; t += 1.0) grid.times.push_back(t);
    grid.times.push_back(t_end + horizon);
    const StateTrajectory forecast = solve_forward(u_end, constant_theta(grid, theta_end), grid);
    for (std::size_t at = 0; at < forecast.values.size(); ++at)
        row(grid.node_time(at), forecast.values[at]);
    return kExitOk;
}

/**
 * @brief control: learn the parameter trajectory that tracks a scheduled
 * (I, D) path starting from the fitted state at `control_start`, and compare
 * it against the baseline fit.
 */
inline int cmd_control(const RunConfig& cfg, const std::string& schedule_path)
{
    const std::filesystem::path out(cfg.out_dir);
    const auto theta_path = out / "theta.csv";
    const auto traj_path = out / "trajectory.csv";
    if (!std::filesystem::exists(theta_path) || !std::filesystem::exists(traj_path))
        throw ConfigError("control: missing fit artifacts in '" + cfg.out_dir +
                          "' (run fit first)");

    const detail::Table schedule_table = detail::read_table(schedule_path);
    if (schedule_table.column("t") != 0 || schedule_table.column("I_d") != 1 ||
        schedule_table.column("D_d") != 2)
        throw DataError(schedule_path + ": expected header t,I_d,D_d");
    ObservedSeries schedule;
    schedule.region = cfg.region;
    for (const auto& r : schedule_table.rows) {
        schedule.times.push_back(r[0]);
        schedule.confirmed.push_back(r[1]);
        schedule.deaths.push_back(r[2]);
    }

    const detail::Table traj_table = detail::read_table(traj_path.string());
    const detail::Table theta_table = detail::read_table(theta_path.string());
    int anchor = -1;
    for (std::size_t r = 0; r < traj_table.rows.size(); ++r)
        if (std::abs(traj_table.rows[r][0] - cfg.control_start) < 1e-9) anchor = static_cast<int>(r);
    if (anchor < 0)
        throw ConfigError("control: control_start " + std::to_string(cfg.control_start) +
                          " is not a fitted trajectory node");
    const auto& srow = traj_table.rows[static_cast<std::size_t>(anchor)];
    const StateVec start_state{srow[1], srow[2], srow[3], srow[4], srow[5]};
    const auto& prow = theta_table.rows[static_cast<std::size_t>(anchor)];
    const ParamVec warm_theta{prow[1], prow[2], prow[3], prow[4]};

    LossWeights weights;
    if (cfg.lambda1 && cfg.lambda2) {
        weights = LossWeights{*cfg.lambda1, *cfg.lambda2};
    } else {
        ObservedSeries interior = schedule;
        weights = LossWeights::normalized(
            interior, TargetPoint{schedule.times.back(), schedule.confirmed.back(),
                                  schedule.deaths.back()});
    }

    const FitResult run = scheduled_control(cfg.control_start, start_state, schedule,
                                            ParamTrajectory{warm_theta}, cfg.bounds, weights,
                                            cfg.tau_vector(), cfg.substeps, cfg.tol, cfg.max_iters);

    detail::write_theta_csv(out / "theta_control.csv", run.trajectory.grid, run.theta);
    detail::write_trajectory_csv(out / "trajectory_control.csv", run.trajectory);

    // Baseline-vs-controlled beta on the controlled nodes; the baseline value
    // is the fitted theta at the nearest node at or before each time.
    double mean_base = 0.0, mean_ctrl = 0.0;
    {
        auto cmp = detail::open_out(out / "control_compare.csv");
        cmp << "t,beta_baseline,beta_controlled,beta_diff\n";
        std::size_t b = 0;
        for (std::size_t at = 0; at < run.theta.size(); ++at) {
            const double t = run.trajectory.grid.node_time(at);
            while (b + 1 < theta_table.rows.size() && theta_table.rows[b + 1][0] <= t + 1e-9) ++b;
            const double base = theta_table.rows[b][1];
            const double ctrl = run.theta[at].beta;
            cmp << t << ',' << base << ',' << ctrl << ',' << ctrl - base << '\n';
            mean_base += base;
            mean_ctrl += ctrl;
        }
        mean_base /= static_cast<double>(run.theta.size());
        mean_ctrl /= static_cast<double>(run.theta.size());
    }

    nlohmann::json report;
    report["control_start"] = cfg.control_start;
    report["targets"] = {{"t", schedule.times.back()},
                         {"I_d", schedule.confirmed.back()},
                         {"D_d", schedule.deaths.back()}};
    report["achieved"] = {{"I", run.trajectory.back().I}, {"D", run.trajectory.back().D}};
    report["iterations"] = run.iterations;
    report["converged"] = run.converged;
    report["loss_history"] = run.loss_history;
    report["mean_beta_baseline"] = mean_base;
    report["mean_beta_controlled"] = mean_ctrl;
    report["mean_beta_reduction"] = mean_base - mean_ctrl;
    {
        auto out_json = detail::open_out(out / "control_report.json");
        out_json << report.dump(2) << '\n';
    }
    return kExitOk;
}

/**
 * @brief simulate: run the SEIR(D) solver and the fraction system under a
 * constant theta; print sigma, R0 and the expected long-run outcome.
 */
inline int cmd_simulate(const RunConfig& cfg)
{
    if (cfg.sim_days < 1.0) throw ConfigError("simulate: sim_days must be >= 1");

    SolverGrid grid;
    grid.substeps = cfg.substeps;
    for (double t = 0.0; t < cfg.sim_days - 1e-9; t += 1.0) grid.times.push_back(t);
    grid.times.push_back(cfg.sim_days);

    const StateTrajectory traj = solve_forward(cfg.sim_u0, constant_theta(grid, cfg.sim_theta), grid);
    const std::filesystem::path out(cfg.out_dir);
    detail::write_trajectory_csv(out / "simulate_trajectory.csv", traj);

    const double n = cfg.sim_u0.living();
    const FractionState x0{cfg.sim_u0.S / n, cfg.sim_u0.E / n, cfg.sim_u0.I / n};
    const FractionRun fractions = integrate_fractions(x0, cfg.sim_theta, 0.0, cfg.sim_days, 0.1, 10);
    {
        auto fout = detail::open_out(out / "fractions.csv");
        fout << "t,s,e,i,r\n";
        for (std::size_t j = 0; j < fractions.values.size(); ++j) {
            const FractionState& x = fractions.values[j];
            fout << fractions.times[j] << ',' << x.s << ',' << x.e << ',' << x.i << ',' << x.r()
                 << '\n';
        }
    }

    const double contact = sigma(cfg.sim_theta, 0.0);
    const double reproduction = r0(cfg.sim_theta);
    std::cout << "sigma = " << contact << "\n"
              << "R0 = " << reproduction << "\n"
              << "outcome: "
              << (contact <= 1.0 ? "extinction expected (sigma <= 1)"
                                 : "persistence expected (sigma > 1)")
              << "\n";
    return kExitOk;
}

} // namespace seirctl

#endif // SEIRCTL_WORKFLOWS_HPP
