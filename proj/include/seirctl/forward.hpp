#ifndef SEIRCTL_FORWARD_HPP
#define SEIRCTL_FORWARD_HPP

#include <span>

#include "seirctl/grid.hpp"
#include "seirctl/model.hpp"

namespace seirctl {

/**
 * @brief One explicit-implicit Gauss-Seidel step of size h.
 *
 * Loss terms are treated implicitly and gain terms use the freshly updated
 * values, so non-negative input yields non-negative output for every h > 0,
 * and S+E+I+R+D telescopes exactly.
 */
inline StateVec forward_step(const StateVec& u, const ParamVec& theta, double h)
{
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("forward_step: step size must be positive");
    if (!u.nonnegative()) throw DomainError("forward_step: state must be non-negative");
    detail::require_rhs_input(u, theta);

    const double n = u.living();
    StateVec next;
    next.S = u.S / (1.0 + h * theta.beta * u.I / n);
    next.E = (u.E + h * theta.beta * next.S * u.I / n) / (1.0 + h * theta.epsilon);
    next.I = (u.I + h * theta.epsilon * next.E) / (1.0 + h * (theta.gamma + theta.mu));
    next.R = u.R + h * theta.gamma * next.I;
    next.D = u.D + h * theta.mu * next.I;
    return next;
}

/**
 * @brief March the state across the whole grid; theta at node (i,k) drives
 * the step from k to k+1.
 */
inline StateTrajectory solve_forward(const StateVec& u0, std::span<const ParamVec> theta,
                                     const SolverGrid& grid)
{
    grid.validate();
    if (theta.size() != grid.nodes())
        throw ConfigError("solve_forward: theta must be defined at every grid node");

    StateTrajectory traj;
    traj.grid = grid;
    traj.values.resize(grid.nodes());
    traj.values[0] = u0;
    for (std::size_t i = 0; i < grid.intervals(); ++i) {
        const double h = grid.step(i);
        for (int k = 0; k < grid.substeps; ++k) {
            const std::size_t at = grid.node(i, k);
            traj.values[at + 1] = forward_step(traj.values[at], theta[at], h);
        }
    }
    return traj;
}

} // namespace seirctl

#endif // SEIRCTL_FORWARD_HPP
