#ifndef SEIRCTL_CONTROL_HPP
#define SEIRCTL_CONTROL_HPP

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "seirctl/adjoint.hpp"
#include "seirctl/data.hpp"
#include "seirctl/forward.hpp"
#include "seirctl/grid.hpp"
#include "seirctl/model.hpp"
#include "seirctl/problem.hpp"

namespace seirctl {

/// Successive-approximation loop abort threshold: J > kDivergenceFactor * J(theta0).
inline constexpr double kDivergenceFactor = 1e3;

/// Rough prior used when no better initial guess is available.
inline constexpr ParamVec kRoughTheta{0.5, 0.2, 0.1, 0.0};

struct FitResult {
    ParamTrajectory theta;
    StateTrajectory trajectory;
    std::vector<double> loss_history; ///< J per iterate, starting at J(theta0)
    std::size_t iterations = 0;
    bool converged = false;
};

/**
 * @brief J = sum_i l1|I(t_i)-I_c|^2 + l2|D(t_i)-D_c|^2 + l1|I(T)-I_d|^2 + l2|D(T)-D_d|^2.
 */
inline double loss(const StateTrajectory& u, const ControlProblem& problem)
{
    const auto data_map = problem.interior_data_map();
    double j = 0.0;
    for (std::size_t i = 0; i < data_map.size(); ++i) {
        if (data_map[i] < 0) continue;
        const auto d = static_cast<std::size_t>(data_map[i]);
        const StateVec& at = u.at_obs(i + 1);
        const double di = at.I - problem.observed.confirmed[d];
        const double dd = at.D - problem.observed.deaths[d];
        j += problem.weights.lambda1 * di * di + problem.weights.lambda2 * dd * dd;
    }
    const double di = u.back().I - problem.target.I_d;
    const double dd = u.back().D - problem.target.D_d;
    j += problem.weights.lambda1 * di * di + problem.weights.lambda2 * dd * dd;
    return j;
}

/**
 * @brief Closed-form proximal update of theta at one grid point, projected
 * into the bounds.
 *
 * The Hamiltonian is linear in theta, so the unconstrained minimizer of
 * H + (1/2) sum_c (theta_c - theta_l_c)^2 / tau_c is theta_l - tau * grad H:
 *
 *   beta'    = beta    + tau_beta    * S*I*(V_S - V_E)/N
 *   epsilon' = epsilon + tau_epsilon * E*(V_E - V_I)
 *   gamma'   = gamma   + tau_gamma   * I*(V_I - V_R)
 *   mu'      = mu      + tau_mu      * I*(V_I - V_D)
 */
inline ParamVec ppa_update(const ParamVec& theta_l, const StateVec& u, const CostateVec& v,
                           const ParamVec& tau, const ParamBounds& bounds)
{
    if (!u.finite() || u.living() <= 0.0) throw DomainError("ppa_update: invalid state");
    if (!v.finite() || !theta_l.finite()) throw DomainError("ppa_update: non-finite input");
    for (int c = 0; c < 4; ++c)
        if (!(tau[c] > 0.0)) throw DomainError("ppa_update: tau must be positive");

    ParamVec theta;
    theta.beta = theta_l.beta + tau.beta * u.S * u.I * (v.V_S - v.V_E) / u.living();
    theta.epsilon = theta_l.epsilon + tau.epsilon * u.E * (v.V_E - v.V_I);
    theta.gamma = theta_l.gamma + tau.gamma * u.I * (v.V_I - v.V_R);
    theta.mu = theta_l.mu + tau.mu * u.I * (v.V_I - v.V_D);
    return bounds.clip(theta);
}

/**
 * @brief Successive approximations: forward state solve, backward co-state
 * solve, pointwise proximal Hamiltonian minimization, projection; repeat
 * until the relative L2 change of the stacked theta vector drops to tol.
 *
 * The per-component step sizes are scaled by a shared backtracking factor so
 * that each accepted iterate keeps the loss non-increasing (the damped
 * proximal behavior plain successive approximation lacks); the factor
 * recovers geometrically toward the configured tau. Throws DivergenceError
 * if the loss still blows past kDivergenceFactor times its starting value.
 */
inline FitResult fit(const ControlProblem& problem, const ParamTrajectory& theta0)
{
    problem.validate();
    if (theta0.size() != problem.grid.nodes())
        throw ConfigError("fit: theta0 must be defined at every grid node");

    FitResult result;
    result.theta.resize(theta0.size());
    std::transform(theta0.begin(), theta0.end(), result.theta.begin(),
                   [&](const ParamVec& p) { return problem.bounds.clip(p); });

    result.trajectory = solve_forward(problem.u0, result.theta, problem.grid);
    const double j0 = loss(result.trajectory, problem);
    result.loss_history.push_back(j0);
    double j_cur = j0;
    double scale = 1.0;
    constexpr double kScaleFloor = 1e-12;

    // Accelerated proximal iteration: the closed-form update is evaluated at
    // an extrapolated point, accepted only if the loss does not increase,
    // with momentum restarts and step backtracking otherwise.
    ParamTrajectory extrap = result.theta;
    StateTrajectory extrap_traj = result.trajectory;
    double momentum = 1.0;
    ParamTrajectory cand(result.theta.size());

    while (result.iterations < problem.max_iters) {
        const CostateTrajectory v = solve_backward(extrap_traj, extrap, problem);
        const ParamVec tau{problem.tau.beta * scale, problem.tau.epsilon * scale,
                           problem.tau.gamma * scale, problem.tau.mu * scale};
        // Decoupled per-node minimization.
        for (std::size_t at = 0; at < cand.size(); ++at)
            cand[at] = ppa_update(extrap[at], extrap_traj.values[at], v.values[at], tau,
                                  problem.bounds);
        StateTrajectory cand_traj = solve_forward(problem.u0, cand, problem.grid);
        const double j_cand = loss(cand_traj, problem);

        const bool extrapolated = momentum > 1.0;
        if (!std::isfinite(j_cand) || j_cand > j_cur * (1.0 + 1e-12)) {
            // Reject: drop the momentum first, then shrink the step.
            if (extrapolated) {
                momentum = 1.0;
                extrap = result.theta;
                extrap_traj = result.trajectory;
            } else if (scale > kScaleFloor) {
                scale *= 0.5;
            } else {
                throw DivergenceError("fit: no acceptable step at the minimum step scale "
                                      "(loss " + std::to_string(j_cand) + " at iteration " +
                                      std::to_string(result.iterations) + ")");
            }
            result.loss_history.push_back(j_cur);
            ++result.iterations;
            continue;
        }

        const double prev_norm = theta_norm(result.theta);
        const double change = theta_distance(cand, result.theta);

        const double momentum_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        extrap = cand;
        const double mix = (momentum - 1.0) / momentum_next;
        for (std::size_t at = 0; at < cand.size(); ++at)
            for (int c = 0; c < 4; ++c)
                extrap[at][c] = cand[at][c] + mix * (cand[at][c] - result.theta[at][c]);
        for (auto& p : extrap) p = problem.bounds.clip(p);
        extrap_traj = solve_forward(problem.u0, extrap, problem.grid);
        momentum = momentum_next;

        result.theta = cand;
        result.trajectory = std::move(cand_traj);
        j_cur = j_cand;
        result.loss_history.push_back(j_cur);
        ++result.iterations;
        scale = std::min(scale * 1.5, 1.0);

        if (j_cur > kDivergenceFactor * j0)
            throw DivergenceError("fit: loss " + std::to_string(j_cur) + " exceeded " +
                                  std::to_string(kDivergenceFactor) + " x initial loss " +
                                  std::to_string(j0) + " at iteration " +
                                  std::to_string(result.iterations));

        const double rel = prev_norm > 0.0 ? change / prev_norm : change;
        if (rel <= problem.tol) {
            result.converged = true;
            break;
        }
    }
    // The end-node control never drives a step (and the terminal co-state has
    // V_S = V_E = 0), so report the left limit there.
    if (result.theta.size() >= 2)
        result.theta.back() = result.theta[result.theta.size() - 2];
    return result;
}

/**
 * @brief theta0 builder: beta/epsilon/gamma from the rough prior, mu per
 * observation interval from the death-increment rule when data allow it.
 *
 * With `beta_from_data` the per-interval beta also starts from the reported
 * growth rate g = d(ln I_c)/dt through the exponential-phase relation
 * beta ~= (g + epsilon)(g + gamma + mu)/epsilon, the transmission analog of
 * the data-driven mu rule.
 *
 * `slice` must carry data at every grid observation time (including the
 * start).
 */
inline ParamTrajectory rough_initial_theta(const ObservedSeries& slice, const SolverGrid& grid,
                                           const ParamBounds& bounds, const ParamVec& rough = kRoughTheta,
                                           bool mu_from_data = true, bool beta_from_data = false)
{
    grid.validate();
    ParamVec base = bounds.clip(rough);
    ParamTrajectory theta(grid.nodes(), base);
    if (!mu_from_data && !beta_from_data) return theta;

    const MuInit mu = mu_init(slice, bounds);
    if (mu.per_interval.size() != grid.intervals())
        throw ConfigError("rough_initial_theta: slice does not match the grid intervals");
    for (std::size_t i = 0; i < grid.intervals(); ++i) {
        ParamVec p = base;
        if (mu_from_data) p.mu = mu.per_interval[i];
        if (beta_from_data) {
            const double growth = std::log(std::max(slice.confirmed[i + 1], 1.0) /
                                           std::max(slice.confirmed[i], 1.0)) /
                                  (slice.times[i + 1] - slice.times[i]);
            p.beta = (growth + p.epsilon) * (growth + p.gamma + p.mu) / p.epsilon;
        }
        p = bounds.clip(p);
        for (int k = 0; k < grid.substeps; ++k) theta[grid.node(i, k)] = p;
    }
    theta[grid.nodes() - 1] = theta[grid.nodes() - 2];
    return theta;
}

/// How each window's loss weights are chosen.
enum class WeightPolicy {
    fixed,         ///< use the problem's weights as given
    per_window,    ///< renormalize 1/max^2 from each window's own data
};

struct WindowReport {
    double t_begin = 0.0;
    double t_end = 0.0;
    std::vector<double> loss_history;
    std::size_t iterations = 0;
    bool converged = false;
    bool rough_restart = false; ///< warm start was abandoned for the rough guess
};

struct WindowedFitResult {
    ParamTrajectory theta;      ///< concatenated over the full grid
    StateTrajectory trajectory; ///< concatenated over the full grid
    std::vector<WindowReport> windows;

    bool all_converged() const
    {
        return std::all_of(windows.begin(), windows.end(),
                           [](const WindowReport& w) { return w.converged; });
    }
};

namespace detail {

/// Data slice over grid observation indices [first, last], times included.
inline ObservedSeries slice_series(const ObservedSeries& all, const SolverGrid& grid,
                                   std::size_t first, std::size_t last)
{
    ObservedSeries out;
    out.region = all.region;
    out.population = all.population;
    std::size_t j = 0;
    for (std::size_t g = first; g <= last; ++g) {
        const double t = grid.times[g];
        while (j < all.size() && all.times[j] < t - 1e-9) ++j;
        if (j >= all.size() || std::abs(all.times[j] - t) > 1e-9)
            throw ConfigError("windowed_fit: no datum at observation day " + std::to_string(t));
        out.times.push_back(all.times[j]);
        out.confirmed.push_back(all.confirmed[j]);
        out.deaths.push_back(all.deaths[j]);
    }
    return out;
}

} // namespace detail

/**
 * @brief Consecutive per-window fits with warm starts.
 *
 * `whole` describes the full horizon: its observed series must carry data at
 * every grid observation time including day 0 (the loss still only sees the
 * interior points of each window; the window end datum becomes that window's
 * terminal target). Window boundaries must be grid observation times and
 * include the first and last. Each window starts from the previous window's
 * terminal state and theta; a window whose warm start diverges or fails to
 * converge is retried once from the rough guess and the lower-loss run wins.
 */
inline WindowedFitResult windowed_fit(const ControlProblem& whole,
                                      const std::vector<double>& window_bounds,
                                      const ParamVec& rough = kRoughTheta,
                                      WeightPolicy policy = WeightPolicy::per_window)
{
    whole.grid.validate();
    whole.bounds.validate();
    if (window_bounds.size() < 2)
        throw ConfigError("windowed_fit: need at least two window boundaries");

    // Window boundaries -> grid observation indices.
    std::vector<std::size_t> cut;
    cut.reserve(window_bounds.size());
    for (double t : window_bounds) {
        const auto it = std::lower_bound(whole.grid.times.begin(), whole.grid.times.end(), t - 1e-9);
        if (it == whole.grid.times.end() || std::abs(*it - t) > 1e-9)
            throw ConfigError("windowed_fit: window boundary " + std::to_string(t) +
                              " is not a grid observation time");
        cut.push_back(static_cast<std::size_t>(it - whole.grid.times.begin()));
    }
    if (cut.front() != 0 || cut.back() != whole.grid.intervals())
        throw ConfigError("windowed_fit: window boundaries must span the whole grid");
    for (std::size_t w = 0; w + 1 < cut.size(); ++w)
        if (!(cut[w] < cut[w + 1]))
            throw ConfigError("windowed_fit: window boundaries must be strictly increasing");

    WindowedFitResult result;
    result.theta.resize(whole.grid.nodes());
    result.trajectory.grid = whole.grid;
    result.trajectory.values.resize(whole.grid.nodes());

    // Full data axis: day 0 is the initial condition, interior points come
    // from the observations, the end point is the target.
    ObservedSeries all;
    all.region = whole.observed.region;
    all.population = whole.observed.population;
    all.times.push_back(whole.grid.times.front());
    all.confirmed.push_back(whole.u0.I);
    all.deaths.push_back(whole.u0.D);
    all.times.insert(all.times.end(), whole.observed.times.begin(), whole.observed.times.end());
    all.confirmed.insert(all.confirmed.end(), whole.observed.confirmed.begin(),
                         whole.observed.confirmed.end());
    all.deaths.insert(all.deaths.end(), whole.observed.deaths.begin(), whole.observed.deaths.end());
    all.times.push_back(whole.target.time);
    all.confirmed.push_back(whole.target.I_d);
    all.deaths.push_back(whole.target.D_d);
    all.validate();

    StateVec state = whole.u0;
    std::optional<ParamVec> warm_theta;

    for (std::size_t w = 0; w + 1 < cut.size(); ++w) {
        const std::size_t first = cut[w], last = cut[w + 1];
        const ObservedSeries slice = detail::slice_series(all, whole.grid, first, last);

        ControlProblem piece;
        piece.grid.substeps = whole.grid.substeps;
        piece.grid.times.assign(whole.grid.times.begin() + static_cast<std::ptrdiff_t>(first),
                                whole.grid.times.begin() + static_cast<std::ptrdiff_t>(last) + 1);
        piece.u0 = state;
        piece.observed.region = slice.region;
        piece.observed.population = slice.population;
        piece.observed.times.assign(slice.times.begin() + 1, slice.times.end() - 1);
        piece.observed.confirmed.assign(slice.confirmed.begin() + 1, slice.confirmed.end() - 1);
        piece.observed.deaths.assign(slice.deaths.begin() + 1, slice.deaths.end() - 1);
        piece.target = TargetPoint{slice.times.back(), slice.confirmed.back(), slice.deaths.back()};
        piece.weights = policy == WeightPolicy::per_window
                            ? LossWeights::normalized(piece.observed, piece.target)
                            : whole.weights;
        piece.bounds = whole.bounds;
        piece.tau = whole.tau;
        piece.tol = whole.tol;
        piece.max_iters = whole.max_iters;

        const ParamTrajectory rough_data =
            rough_initial_theta(slice, piece.grid, piece.bounds, rough, true, true);
        const ParamTrajectory theta0 =
            warm_theta ? ParamTrajectory(piece.grid.nodes(), *warm_theta)
                       : rough_data;
        const ParamTrajectory fallback0 =
            warm_theta ? rough_data : rough_initial_theta(slice, piece.grid, piece.bounds, rough);

        FitResult run;
        bool rough_restart = false;
        bool primary_ok = true;
        try {
            run = fit(piece, theta0);
        } catch (const DivergenceError&) {
            primary_ok = false;
        }
        if (!primary_ok || !run.converged) {
            // Poor start; per the windowing remark fall back to the rough guess.
            try {
                FitResult retry = fit(piece, fallback0);
                if (!primary_ok || retry.loss_history.back() < run.loss_history.back()) {
                    run = std::move(retry);
                    rough_restart = true;
                }
            } catch (const DivergenceError&) {
                if (!primary_ok)
                    throw DivergenceError("windowed_fit: window " + std::to_string(w) +
                                          " diverged from both its primary and fallback starts");
            }
        }

        WindowReport report;
        report.t_begin = piece.grid.times.front();
        report.t_end = piece.grid.times.back();
        report.loss_history = run.loss_history;
        report.iterations = run.iterations;
        report.converged = run.converged;
        report.rough_restart = rough_restart;
        result.windows.push_back(std::move(report));

        // Concatenate; the shared boundary node belongs to the next window
        // except at the very end.
        const std::size_t base = whole.grid.obs_node(first);
        const std::size_t count = piece.grid.nodes() - (w + 2 < cut.size() ? 1 : 0);
        for (std::size_t at = 0; at < count; ++at) {
            result.theta[base + at] = run.theta[at];
            result.trajectory.values[base + at] = run.trajectory.values[at];
        }
        if (w + 2 < cut.size())
            result.trajectory.values[whole.grid.obs_node(last)] = run.trajectory.values.back();

        state = run.trajectory.back();
        warm_theta = run.theta.back();
    }
    return result;
}

/**
 * @brief Gradient of a terminal-only cost with respect to a constant theta
 * via one forward and one backward sweep and the left-endpoint quadrature of
 * (dF/dtheta)^T V.
 */
inline ParamVec gradient_constant_theta(const ControlProblem& problem, const ParamVec& theta)
{
    problem.validate();
    if (problem.observed.size() != 0)
        throw ConfigError("gradient_constant_theta: the problem must carry a terminal cost only");

    const ParamTrajectory theta_traj = constant_theta(problem.grid, theta);
    const StateTrajectory u = solve_forward(problem.u0, theta_traj, problem.grid);
    const CostateTrajectory v = solve_backward(u, theta_traj, problem);

    ParamVec grad{};
    for (std::size_t i = 0; i < problem.grid.intervals(); ++i) {
        const double h = problem.grid.step(i);
        for (int k = 0; k < problem.grid.substeps; ++k) {
            const std::size_t at = problem.grid.node(i, k);
            const ParamMatrix jp = jacobian_params(u.values[at]);
            const CostateVec& vk = v.values[at];
            const double vs[5] = {vk.V_S, vk.V_E, vk.V_I, vk.V_R, vk.V_D};
            for (int c = 0; c < 4; ++c) {
                double dot = 0.0;
                for (int r = 0; r < 5; ++r) dot += jp[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] * vs[r];
                grad[c] += h * dot;
            }
        }
    }
    return grad;
}

/// Fraction of grid points whose component sits at a bound (diagnostic for unreachable targets).
struct PinnedReport {
    double at_lower[4] = {0, 0, 0, 0};
    double at_upper[4] = {0, 0, 0, 0};

    std::string describe() const
    {
        std::string s;
        for (int c = 0; c < 4; ++c) {
            s += std::string(param_name(c)) + ": " + std::to_string(100.0 * at_lower[c]) +
                 "% at lower / " + std::to_string(100.0 * at_upper[c]) + "% at upper";
            if (c < 3) s += ", ";
        }
        return s;
    }
};

inline PinnedReport pinned_fractions(const ParamTrajectory& theta, const ParamBounds& bounds)
{
    PinnedReport report;
    if (theta.empty()) return report;
    for (const ParamVec& p : theta)
        for (int c = 0; c < 4; ++c) {
            if (p[c] <= bounds.lower[c]) report.at_lower[c] += 1.0;
            if (p[c] >= bounds.upper[c]) report.at_upper[c] += 1.0;
        }
    for (int c = 0; c < 4; ++c) {
        report.at_lower[c] /= static_cast<double>(theta.size());
        report.at_upper[c] /= static_cast<double>(theta.size());
    }
    return report;
}

/// Terminal misfit above this (relative) => scheduled target deemed unreachable.
inline constexpr double kUnreachableRelTol = 0.05;

/**
 * @brief Learn a parameter trajectory that drives (I, D) along a scheduled
 * path: the schedule's interior rows play the role of data, its last row is
 * the terminal target.
 *
 * Throws UnreachableTargetError when the schedule violates model
 * monotonicity (D can never decrease) or when the optimizer stalls with the
 * terminal state off target, reporting which parameters sit pinned at their
 * bounds.
 */
inline FitResult scheduled_control(double start_time, const StateVec& start_state,
                                   const ObservedSeries& schedule, const ParamTrajectory& theta_init,
                                   const ParamBounds& bounds, const LossWeights& weights,
                                   const ParamVec& tau, int substeps, double tol,
                                   std::size_t max_iters)
{
    schedule.validate();
    if (schedule.size() < 1) throw ConfigError("scheduled_control: empty schedule");
    if (schedule.times.front() <= start_time + 1e-9)
        throw ConfigError("scheduled_control: schedule must start after the control start time");
    for (std::size_t j = 0; j + 1 < schedule.size(); ++j)
        if (schedule.confirmed[j + 1] < schedule.confirmed[j] ||
            schedule.deaths[j + 1] < schedule.deaths[j])
            throw UnreachableTargetError(
                "scheduled_control: scheduled cumulative values must be non-decreasing");
    if (schedule.deaths.front() < start_state.D)
        throw UnreachableTargetError(
            "scheduled_control: scheduled deaths fall below the current death count, but D is "
            "non-decreasing in the model");

    ControlProblem problem;
    problem.grid.substeps = substeps;
    problem.grid.times.push_back(start_time);
    problem.grid.times.insert(problem.grid.times.end(), schedule.times.begin(), schedule.times.end());
    problem.u0 = start_state;
    problem.observed.region = schedule.region;
    problem.observed.times.assign(schedule.times.begin(), schedule.times.end() - 1);
    problem.observed.confirmed.assign(schedule.confirmed.begin(), schedule.confirmed.end() - 1);
    problem.observed.deaths.assign(schedule.deaths.begin(), schedule.deaths.end() - 1);
    problem.target = TargetPoint{schedule.times.back(), schedule.confirmed.back(), schedule.deaths.back()};
    problem.weights = weights;
    problem.bounds = bounds;
    problem.tau = tau;
    problem.tol = tol;
    problem.max_iters = max_iters;

    FitResult run = fit(problem, theta_init.size() == problem.grid.nodes()
                                     ? theta_init
                                     : ParamTrajectory(problem.grid.nodes(),
                                                       theta_init.empty() ? kRoughTheta
                                                                          : theta_init.front()));

    const double rel_i = std::abs(run.trajectory.back().I - problem.target.I_d) /
                         std::max(problem.target.I_d, 1.0);
    const double rel_d = std::abs(run.trajectory.back().D - problem.target.D_d) /
                         std::max(problem.target.D_d, 1.0);
    if (rel_i > kUnreachableRelTol || rel_d > kUnreachableRelTol) {
        const PinnedReport pinned = pinned_fractions(run.theta, bounds);
        throw UnreachableTargetError(
            "scheduled_control: target unreachable within the parameter box (terminal misfit I " +
            std::to_string(100.0 * rel_i) + "%, D " + std::to_string(100.0 * rel_d) +
            "%); pinned fractions: " + pinned.describe());
    }
    return run;
}

} // namespace seirctl

#endif // SEIRCTL_CONTROL_HPP
