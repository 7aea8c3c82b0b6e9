#ifndef SEIRCTL_ADJOINT_HPP
#define SEIRCTL_ADJOINT_HPP

#include <span>

#include "seirctl/grid.hpp"
#include "seirctl/model.hpp"
#include "seirctl/problem.hpp"

namespace seirctl {

/**
 * @brief One explicit-implicit co-state step from node k+1 back to node k.
 *
 * Coefficients are frozen at the stored forward state U_k; V_S and V_E feed
 * the V_I update within the same sweep (Gauss-Seidel order) and V_R, V_D
 * pass through unchanged. Every denominator is structurally positive, so the
 * step is well defined for any h > 0.
 */
inline CostateVec backward_step(const CostateVec& v_next, const StateVec& u, const ParamVec& theta,
                                double h)
{
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("backward_step: step size must be positive");
    if (!v_next.finite()) throw DomainError("backward_step: non-finite co-state");
    if (!u.nonnegative()) throw DomainError("backward_step: state must be non-negative");
    detail::require_rhs_input(u, theta);

    const double n = u.living();
    const double n2 = n * n;
    const double mix = h * theta.beta * u.I * (n - u.S);

    CostateVec v;
    v.V_S = (v_next.V_S * n2 + mix * v_next.V_E) / (n2 + mix);
    v.V_E = (v_next.V_E + h * theta.epsilon * v_next.V_I) / (1.0 + h * theta.epsilon);
    v.V_I = (v_next.V_I + h * (theta.gamma * v_next.V_R + theta.mu * v_next.V_D -
                               theta.beta * u.S * (n - u.I) * (v.V_S - v.V_E) / n2)) /
            (1.0 + h * (theta.gamma + theta.mu));
    v.V_R = v_next.V_R;
    v.V_D = v_next.V_D;
    return v;
}

/// Terminal seed V(T) = grad_U g = [0, 0, 2*l1*(I-I_d), 0, 2*l2*(D-D_d)].
inline CostateVec terminal_costate(const StateVec& u_T, const TargetPoint& target,
                                   const LossWeights& weights)
{
    weights.validate();
    if (!u_T.finite()) throw DomainError("terminal_costate: non-finite state");
    return CostateVec{0.0, 0.0, 2.0 * weights.lambda1 * (u_T.I - target.I_d), 0.0,
                      2.0 * weights.lambda2 * (u_T.D - target.D_d)};
}

/// Observation-time jump V(t_i^-) = V(t_i^+) + grad_U L(U(t_i)).
inline CostateVec jump_update(const CostateVec& v_right, const StateVec& u_ti,
                              const ObservedPoint& obs, const LossWeights& weights)
{
    weights.validate();
    if (!v_right.finite() || !u_ti.finite()) throw DomainError("jump_update: non-finite input");
    CostateVec v = v_right;
    v.V_I += 2.0 * weights.lambda1 * (u_ti.I - obs.I_c);
    v.V_D += 2.0 * weights.lambda2 * (u_ti.D - obs.D_c);
    return v;
}

/**
 * @brief Backward sweep over the whole grid: seed at T from the terminal
 * cost, step interval by interval, add the data jump when crossing each
 * interior observation time.
 *
 * The stored value at a shared node is the right limit V(t_i^+); the
 * post-jump left limit only feeds the next interval's sweep.
 */
inline CostateTrajectory solve_backward(const StateTrajectory& u, std::span<const ParamVec> theta,
                                        const ControlProblem& problem)
{
    const SolverGrid& grid = u.grid;
    if (u.values.size() != grid.nodes() || theta.size() != grid.nodes())
        throw ConfigError("solve_backward: state/theta must cover the full grid");
    const auto data_map = problem.interior_data_map();

    CostateTrajectory traj;
    traj.grid = grid;
    traj.values.resize(grid.nodes());

    CostateVec v = terminal_costate(u.back(), problem.target, problem.weights);
    traj.values.back() = v;
    for (std::size_t i = grid.intervals(); i-- > 0;) {
        if (i + 1 < grid.intervals()) {
            const int j = data_map[i];
            if (j >= 0)
                v = jump_update(v, u.at_obs(i + 1),
                                ObservedPoint{problem.observed.confirmed[static_cast<std::size_t>(j)],
                                              problem.observed.deaths[static_cast<std::size_t>(j)]},
                                problem.weights);
        }
        const double h = grid.step(i);
        for (int k = grid.substeps - 1; k >= 0; --k) {
            const std::size_t at = grid.node(i, k);
            v = backward_step(v, u.values[at], theta[at], h);
            traj.values[at] = v;
        }
    }
    return traj;
}

} // namespace seirctl

#endif // SEIRCTL_ADJOINT_HPP
