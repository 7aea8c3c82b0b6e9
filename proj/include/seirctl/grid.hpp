#ifndef SEIRCTL_GRID_HPP
#define SEIRCTL_GRID_HPP

#include <cstddef>
#include <vector>

#include "seirctl/errors.hpp"
#include "seirctl/model.hpp"

namespace seirctl {

/**
 * @brief Time grid: observation times t_0 < ... < t_n, each interval split
 * into m equal sub-steps.
 *
 * Nodes are addressed either as (interval i, sub-index k) with i in [0, n)
 * and k in [0, m], or by flat index i*m + k; the right endpoint of interval
 * i and the left endpoint of interval i+1 are the same node.
 */
struct SolverGrid {
    std::vector<double> times; ///< observation times, strictly increasing
    int substeps = 10;         ///< sub-steps m per observation interval

    std::size_t intervals() const { return times.empty() ? 0 : times.size() - 1; }
    std::size_t nodes() const { return intervals() * static_cast<std::size_t>(substeps) + 1; }

    double step(std::size_t interval) const
    {
        return (times[interval + 1] - times[interval]) / substeps;
    }

    std::size_t node(std::size_t interval, int k) const
    {
        return interval * static_cast<std::size_t>(substeps) + static_cast<std::size_t>(k);
    }

    /// Flat node index of observation time times[i].
    std::size_t obs_node(std::size_t i) const { return i * static_cast<std::size_t>(substeps); }

    double node_time(std::size_t flat) const
    {
        const std::size_t m = static_cast<std::size_t>(substeps);
        const std::size_t interval = (flat == nodes() - 1) ? intervals() - 1 : flat / m;
        const std::size_t k = flat - interval * m;
        return times[interval] + static_cast<double>(k) * step(interval);
    }

    void validate() const
    {
        if (times.size() < 2) throw ConfigError("SolverGrid: need at least two observation times");
        if (substeps < 1) throw ConfigError("SolverGrid: substeps must be >= 1");
        for (std::size_t i = 0; i + 1 < times.size(); ++i)
            if (!(times[i] < times[i + 1]))
                throw ConfigError("SolverGrid: observation times must be strictly increasing");
    }
};

/// State values at every grid node; boundary nodes are shared between intervals.
struct StateTrajectory {
    SolverGrid grid;
    std::vector<StateVec> values;

    const StateVec& at_obs(std::size_t i) const { return values[grid.obs_node(i)]; }
    const StateVec& back() const { return values.back(); }
};

/**
 * @brief Co-state values at every grid node.
 *
 * The co-state is discontinuous at interior observation times; the value
 * stored at a shared node is the right limit V(t_i^+), i.e. the one paired
 * with the control that acts on [t_i, t_i + h). Jump (left-limit) values are
 * transient within the backward sweep and are not stored.
 */
struct CostateTrajectory {
    SolverGrid grid;
    std::vector<CostateVec> values;
};

/// Control values theta at every grid node (flat-indexed like the state).
using ParamTrajectory = std::vector<ParamVec>;

inline ParamTrajectory constant_theta(const SolverGrid& grid, const ParamVec& theta)
{
    return ParamTrajectory(grid.nodes(), theta);
}

/// Stacked L2 norm over all grid nodes and components.
inline double theta_norm(const ParamTrajectory& theta)
{
    double sq = 0.0;
    for (const auto& p : theta)
        for (int c = 0; c < 4; ++c) sq += p[c] * p[c];
    return std::sqrt(sq);
}

inline double theta_distance(const ParamTrajectory& a, const ParamTrajectory& b)
{
    double sq = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        for (int c = 0; c < 4; ++c) {
            const double d = a[j][c] - b[j][c];
            sq += d * d;
        }
    return std::sqrt(sq);
}

} // namespace seirctl

#endif // SEIRCTL_GRID_HPP
