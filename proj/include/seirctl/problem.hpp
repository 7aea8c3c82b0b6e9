#ifndef SEIRCTL_PROBLEM_HPP
#define SEIRCTL_PROBLEM_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "seirctl/data.hpp"
#include "seirctl/errors.hpp"
#include "seirctl/grid.hpp"
#include "seirctl/model.hpp"

namespace seirctl {

/// One reported datum (I_c, D_c) at an observation time.
struct ObservedPoint {
    double I_c = 0.0;
    double D_c = 0.0;
};

/// Misfit weights; 1/persons^2 so both loss terms sit at a comparable scale.
struct LossWeights {
    double lambda1 = 1.0; ///< weight on infection misfit
    double lambda2 = 1.0; ///< weight on death misfit

    void validate() const
    {
        if (!std::isfinite(lambda1) || !std::isfinite(lambda2) || lambda1 < 0.0 || lambda2 < 0.0)
            throw ConfigError("LossWeights: weights must be finite and non-negative");
        if (lambda1 == 0.0 && lambda2 == 0.0)
            throw ConfigError("LossWeights: at least one weight must be positive");
    }

    /// 1/max^2 normalization over the given data (floored at 1 count to stay finite).
    static LossWeights normalized(const ObservedSeries& observed, const TargetPoint& target)
    {
        double max_i = target.I_d, max_d = target.D_d;
        for (double v : observed.confirmed) max_i = std::max(max_i, v);
        for (double v : observed.deaths) max_d = std::max(max_d, v);
        max_i = std::max(max_i, 1.0);
        max_d = std::max(max_d, 1.0);
        return LossWeights{1.0 / (max_i * max_i), 1.0 / (max_d * max_d)};
    }
};

/**
 * @brief A fully assembled fit / scheduled-control task.
 *
 * The grid's interior observation times may each carry a datum from
 * `observed`; the end time carries the target. `tau` holds the per-component
 * proximal step sizes.
 */
struct ControlProblem {
    SolverGrid grid;
    StateVec u0;
    ObservedSeries observed; ///< data at interior observation times only
    TargetPoint target;      ///< desired (I, D) at the grid's end time
    LossWeights weights;
    ParamBounds bounds = ParamBounds::covid_defaults();
    ParamVec tau{1e-4, 1e-6, 1e-6, 1e-8}; ///< proximal step per component
    double tol = 1e-4;
    std::size_t max_iters = 5000;

    /**
     * Map each interior grid observation time to the index of its datum in
     * `observed`, or -1 where no datum exists. Throws if a datum's time is
     * not an interior grid time.
     */
    std::vector<int> interior_data_map() const
    {
        std::vector<int> map(grid.intervals() >= 1 ? grid.intervals() - 1 : 0, -1);
        std::size_t g = 1;
        for (std::size_t j = 0; j < observed.size(); ++j) {
            while (g + 1 < grid.times.size() &&
                   grid.times[g] < observed.times[j] - 1e-9)
                ++g;
            if (g + 1 >= grid.times.size() || std::abs(grid.times[g] - observed.times[j]) > 1e-9)
                throw ConfigError("ControlProblem: observation at day " +
                                  std::to_string(observed.times[j]) +
                                  " is not an interior grid time");
            map[g - 1] = static_cast<int>(j);
        }
        return map;
    }

    void validate() const
    {
        grid.validate();
        bounds.validate();
        weights.validate();
        observed.validate();
        if (!u0.finite() || !u0.nonnegative() || u0.living() <= 0.0)
            throw ConfigError("ControlProblem: invalid initial state");
        for (int c = 0; c < 4; ++c)
            if (!(tau[c] > 0.0))
                throw ConfigError(std::string("ControlProblem: tau must be positive for ") +
                                  param_name(c));
        if (!(tol > 0.0)) throw ConfigError("ControlProblem: tol must be positive");
        if (max_iters < 1) throw ConfigError("ControlProblem: max_iters must be >= 1");
        if (std::abs(target.time - grid.times.back()) > 1e-9)
            throw ConfigError("ControlProblem: target time must equal the grid end time");
        if (target.I_d < 0.0 || target.D_d < 0.0)
            throw ConfigError("ControlProblem: target values must be non-negative");
        (void)interior_data_map();
    }
};

} // namespace seirctl

#endif // SEIRCTL_PROBLEM_HPP
