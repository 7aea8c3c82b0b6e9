#ifndef SEIRCTL_SIMULATE_HPP
#define SEIRCTL_SIMULATE_HPP

#include <vector>

#include "seirctl/model.hpp"

namespace seirctl {

/// Classical RK4 step for the fraction system.
inline FractionState rk4_fraction_step(const FractionState& x, const ParamVec& theta, double b,
                                       double dt)
{
    const auto add = [](const FractionState& a, const FractionState& d, double w) {
        return FractionState{a.s + w * d.s, a.e + w * d.e, a.i + w * d.i};
    };
    const FractionState k1 = fraction_rhs(x, theta, b);
    const FractionState k2 = fraction_rhs(add(x, k1, dt / 2.0), theta, b);
    const FractionState k3 = fraction_rhs(add(x, k2, dt / 2.0), theta, b);
    const FractionState k4 = fraction_rhs(add(x, k3, dt), theta, b);
    FractionState next = x;
    next.s += dt / 6.0 * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s);
    next.e += dt / 6.0 * (k1.e + 2.0 * k2.e + 2.0 * k3.e + k4.e);
    next.i += dt / 6.0 * (k1.i + 2.0 * k2.i + 2.0 * k3.i + k4.i);
    return next;
}

struct FractionRun {
    std::vector<double> times;
    std::vector<FractionState> values;
    double max_i = 0.0;

    const FractionState& final_state() const { return values.back(); }
};

/**
 * @brief Integrate the fraction system from x0 over [0, t_end] with fixed
 * RK4 steps, recording every record_every-th node.
 */
inline FractionRun integrate_fractions(const FractionState& x0, const ParamVec& theta, double b,
                                       double t_end, double dt, std::size_t record_every = 1)
{
    if (!(dt > 0.0) || !(t_end >= 0.0))
        throw DomainError("integrate_fractions: need dt > 0 and t_end >= 0");
    FractionRun run;
    FractionState x = x0;
    run.times.push_back(0.0);
    run.values.push_back(x);
    run.max_i = x.i;
    const auto steps = static_cast<std::size_t>(t_end / dt + 0.5);
    for (std::size_t s = 1; s <= steps; ++s) {
        x = rk4_fraction_step(x, theta, b, dt);
        run.max_i = std::max(run.max_i, x.i);
        if (s % record_every == 0 || s == steps) {
            run.times.push_back(static_cast<double>(s) * dt);
            run.values.push_back(x);
        }
    }
    return run;
}

} // namespace seirctl

#endif // SEIRCTL_SIMULATE_HPP
