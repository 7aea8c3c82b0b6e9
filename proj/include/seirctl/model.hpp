#ifndef SEIRCTL_MODEL_HPP
#define SEIRCTL_MODEL_HPP

#include <array>
#include <cmath>
#include <string>

#include "seirctl/errors.hpp"

namespace seirctl {

/**
 * @brief Compartment state U = [S, E, I, R, D] at one time point.
 *
 * Counts are real-valued persons. The living population N = S + E + I + R
 * excludes D; every right-hand-side evaluation requires N > 0.
 */
struct StateVec {
    double S = 0.0;
    double E = 0.0;
    double I = 0.0;
    double R = 0.0;
    double D = 0.0;

    /// Living population S + E + I + R.
    double living() const { return S + E + I + R; }
    /// Sum of all five compartments (conserved when A = b = d = 0).
    double total() const { return S + E + I + R + D; }

    bool finite() const
    {
        return std::isfinite(S) && std::isfinite(E) && std::isfinite(I) && std::isfinite(R) &&
               std::isfinite(D);
    }
    bool nonnegative() const { return S >= 0.0 && E >= 0.0 && I >= 0.0 && R >= 0.0 && D >= 0.0; }
};

/**
 * @brief Rate parameters theta = [beta, epsilon, gamma, mu], all per day.
 *
 * beta: effective contact rate; epsilon: exposed-to-infectious rate;
 * gamma: recovery rate; mu: virus-related death rate.
 */
struct ParamVec {
    double beta = 0.0;
    double epsilon = 0.0;
    double gamma = 0.0;
    double mu = 0.0;

    double operator[](int c) const
    {
        switch (c) {
            case 0: return beta;
            case 1: return epsilon;
            case 2: return gamma;
            default: return mu;
        }
    }
    double& operator[](int c)
    {
        switch (c) {
            case 0: return beta;
            case 1: return epsilon;
            case 2: return gamma;
            default: return mu;
        }
    }

    bool finite() const
    {
        return std::isfinite(beta) && std::isfinite(epsilon) && std::isfinite(gamma) &&
               std::isfinite(mu);
    }
    bool nonnegative() const { return beta >= 0.0 && epsilon >= 0.0 && gamma >= 0.0 && mu >= 0.0; }
};

inline const char* param_name(int c)
{
    static constexpr std::array<const char*, 4> names{"beta", "epsilon", "gamma", "mu"};
    return names[static_cast<std::size_t>(c)];
}

/// Componentwise box for admissible parameters.
struct ParamBounds {
    ParamVec lower;
    ParamVec upper;

    ParamVec clip(const ParamVec& p) const
    {
        ParamVec out = p;
        for (int c = 0; c < 4; ++c) {
            if (out[c] < lower[c]) out[c] = lower[c];
            if (out[c] > upper[c]) out[c] = upper[c];
        }
        return out;
    }

    bool contains(const ParamVec& p) const
    {
        for (int c = 0; c < 4; ++c)
            if (p[c] < lower[c] || p[c] > upper[c]) return false;
        return true;
    }

    void validate() const
    {
        if (!lower.finite() || !upper.finite())
            throw DomainError("ParamBounds: bounds must be finite");
        for (int c = 0; c < 4; ++c) {
            if (lower[c] < 0.0 || lower[c] > upper[c])
                throw DomainError(std::string("ParamBounds: need 0 <= lower <= upper for ") +
                                  param_name(c));
        }
    }

    /// CDC-informed default box used by the COVID-19 workflows.
    static ParamBounds covid_defaults()
    {
        return ParamBounds{ParamVec{0.0, 0.2, 0.1, 0.0}, ParamVec{5.0, 0.25, 0.2, 0.01}};
    }
};

/// Demographic terms; the numerical workflows run with A = b = d = 0.
struct DemographyParams {
    double A = 0.0; ///< recruitment, persons/day
    double b = 0.0; ///< birth rate, 1/day
    double d = 0.0; ///< natural death rate, 1/day
};

/// Adjoint values V = [V_S, V_E, V_I, V_R, V_D]; sign-unrestricted.
struct CostateVec {
    double V_S = 0.0;
    double V_E = 0.0;
    double V_I = 0.0;
    double V_R = 0.0;
    double V_D = 0.0;

    bool finite() const
    {
        return std::isfinite(V_S) && std::isfinite(V_E) && std::isfinite(V_I) &&
               std::isfinite(V_R) && std::isfinite(V_D);
    }
};

/**
 * @brief Fractions (s, e, i) of the living population; r = 1 - s - e - i.
 *
 * Valid points lie in Sigma = { s,e,i >= 0, s+e+i <= 1 }.
 */
struct FractionState {
    double s = 0.0;
    double e = 0.0;
    double i = 0.0;

    double r() const { return 1.0 - s - e - i; }

    bool in_sigma(double tol = 1e-12) const
    {
        return s >= -tol && e >= -tol && i >= -tol && s + e + i <= 1.0 + tol;
    }
};

using StateMatrix = std::array<std::array<double, 5>, 5>; ///< rows dF, cols d(S,E,I,R,D)
using ParamMatrix = std::array<std::array<double, 4>, 5>; ///< rows dF, cols d(beta,eps,gamma,mu)

namespace detail {

inline void require_rhs_input(const StateVec& u, const ParamVec& theta)
{
    if (!u.finite() || !theta.finite()) throw DomainError("seir: non-finite input");
    if (u.living() <= 0.0) throw DomainError("seir: living population must be positive");
    if (!theta.nonnegative()) throw DomainError("seir: rates must be non-negative");
}

} // namespace detail

/**
 * @brief SEIR(D) right-hand side F(U, theta) with optional demography.
 *
 * dS = A - beta*S*I/N - d*S
 * dE = beta*S*I/N - epsilon*E - d*E
 * dI = epsilon*E - (mu + gamma + d)*I
 * dR = gamma*I - d*R
 * dD = mu*I
 *
 * with N the living population. With A = b = d = 0 the components sum to zero.
 */
inline StateVec seir_rhs(const StateVec& u, const ParamVec& theta, const DemographyParams& demo = {})
{
    detail::require_rhs_input(u, theta);
    if (demo.A < 0.0 || demo.b < 0.0 || demo.d < 0.0)
        throw DomainError("seir_rhs: demography rates must be non-negative");

    const double n = u.living();
    const double infection = theta.beta * u.S * u.I / n;
    const double progression = theta.epsilon * u.E;
    const double recovery = theta.gamma * u.I;
    const double death = theta.mu * u.I;
    StateVec dudt;
    dudt.S = demo.A - infection - demo.d * u.S;
    dudt.E = infection - progression - demo.d * u.E;
    dudt.I = progression - death - recovery - demo.d * u.I;
    dudt.R = recovery - demo.d * u.R;
    dudt.D = death;
    return dudt;
}

/**
 * @brief State sensitivity matrix of the b = d = 0 system.
 *
 * The S and I columns carry the N-dependence through (N-S)/N^2 and
 * (N-I)/N^2; the R and D columns are zero and the R, D rows depend on I
 * only. This is the matrix whose transpose drives the co-state sweep.
 */
inline StateMatrix jacobian_state(const StateVec& u, const ParamVec& theta)
{
    detail::require_rhs_input(u, theta);
    const double n = u.living();
    const double n2 = n * n;
    const double dS = theta.beta * u.I * (n - u.S) / n2;
    const double dI = theta.beta * u.S * (n - u.I) / n2;

    StateMatrix j{};
    j[0][0] = -dS;
    j[0][2] = -dI;
    j[1][0] = dS;
    j[1][1] = -theta.epsilon;
    j[1][2] = dI;
    j[2][1] = theta.epsilon;
    j[2][2] = -(theta.mu + theta.gamma);
    j[3][2] = theta.gamma;
    j[4][2] = theta.mu;
    return j;
}

/**
 * @brief Parameter sensitivity dF/dtheta (5x4), exact.
 */
inline ParamMatrix jacobian_params(const StateVec& u)
{
    if (!u.finite()) throw DomainError("jacobian_params: non-finite input");
    if (u.living() <= 0.0) throw DomainError("jacobian_params: living population must be positive");
    const double si_over_n = u.S * u.I / u.living();

    ParamMatrix j{};
    j[0][0] = -si_over_n;
    j[1][0] = si_over_n;
    j[1][1] = -u.E;
    j[2][1] = u.E;
    j[2][2] = -u.I;
    j[3][2] = u.I;
    j[2][3] = -u.I;
    j[4][3] = u.I;
    return j;
}

/**
 * @brief Hamiltonian H(U, V, theta) = V . F(U, theta), expanded form; linear in theta.
 */
inline double hamiltonian(const StateVec& u, const CostateVec& v, const ParamVec& theta)
{
    detail::require_rhs_input(u, theta);
    if (!v.finite()) throw DomainError("hamiltonian: non-finite co-state");
    const double infection = theta.beta * u.S * u.I / u.living();
    return -v.V_S * infection + v.V_E * (infection - theta.epsilon * u.E) +
           v.V_I * (theta.epsilon * u.E - (theta.gamma + theta.mu) * u.I) +
           v.V_R * theta.gamma * u.I + v.V_D * theta.mu * u.I;
}

/// Basic reproduction number R0 = beta / (gamma + mu).
inline double r0(const ParamVec& theta)
{
    if (!theta.finite()) throw DomainError("r0: non-finite parameters");
    const double denom = theta.gamma + theta.mu;
    if (denom <= 0.0) throw DomainError("r0: gamma + mu must be positive");
    return theta.beta / denom;
}

/// Modified contact number sigma = beta*epsilon / ((epsilon+b)(gamma+mu+b)); sigma <= R0 for b >= 0.
inline double sigma(const ParamVec& theta, double b)
{
    if (!theta.finite() || !std::isfinite(b)) throw DomainError("sigma: non-finite input");
    const double denom = (theta.epsilon + b) * (theta.gamma + theta.mu + b);
    if (denom <= 0.0) throw DomainError("sigma: zero denominator");
    return theta.beta * theta.epsilon / denom;
}

/**
 * @brief Fraction-system right-hand side on Sigma.
 *
 * ds = b - b*s - beta*i*s + mu*i*s
 * de = beta*i*s - (epsilon + b)*e + mu*i*e
 * di = epsilon*e - (mu + gamma + b)*i + mu*i^2
 */
inline FractionState fraction_rhs(const FractionState& x, const ParamVec& theta, double b)
{
    if (!theta.finite() || !std::isfinite(b) || !std::isfinite(x.s) || !std::isfinite(x.e) ||
        !std::isfinite(x.i))
        throw DomainError("fraction_rhs: non-finite input");
    if (!x.in_sigma()) throw DomainError("fraction_rhs: state outside Sigma");

    FractionState dxdt;
    dxdt.s = b - b * x.s - theta.beta * x.i * x.s + theta.mu * x.i * x.s;
    dxdt.e = theta.beta * x.i * x.s - (theta.epsilon + b) * x.e + theta.mu * x.i * x.e;
    dxdt.i = theta.epsilon * x.e - (theta.mu + theta.gamma + b) * x.i + theta.mu * x.i * x.i;
    return dxdt;
}

} // namespace seirctl

#endif // SEIRCTL_MODEL_HPP
