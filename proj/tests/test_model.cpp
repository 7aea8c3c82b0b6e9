#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "seirctl/model.hpp"
#include "seirctl/simulate.hpp"

using namespace seirctl;

namespace {

const ParamVec kTheta{0.5, 0.2, 0.1, 0.01};
const StateVec kState{990.0, 0.0, 10.0, 0.0, 0.0};

StateVec random_state(std::mt19937& rng, double scale = 1000.0)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    StateVec u{scale * unit(rng) + 1.0, scale * unit(rng), scale * unit(rng), scale * unit(rng),
               scale * unit(rng)};
    return u;
}

ParamVec random_theta(std::mt19937& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    return ParamVec{5.0 * unit(rng), 0.2 + 0.05 * unit(rng), 0.1 + 0.1 * unit(rng),
                    0.01 * unit(rng)};
}

double rhs_dot(const StateVec& d, const CostateVec& v)
{
    return v.V_S * d.S + v.V_E * d.E + v.V_I * d.I + v.V_R * d.R + v.V_D * d.D;
}

} // namespace

TEST_CASE("seir_rhs matches the hand-evaluated example")
{
    const StateVec d = seir_rhs(kState, kTheta);
    CHECK(d.S == doctest::Approx(-4.95).epsilon(1e-12));
    CHECK(d.E == doctest::Approx(4.95).epsilon(1e-12));
    CHECK(d.I == doctest::Approx(-1.1).epsilon(1e-12));
    CHECK(d.R == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.D == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("seir_rhs without infected is stationary")
{
    const StateVec d = seir_rhs(StateVec{1000.0, 0.0, 0.0, 0.0, 0.0}, kTheta);
    CHECK(d.S == 0.0);
    CHECK(d.E == 0.0);
    CHECK(d.I == 0.0);
    CHECK(d.R == 0.0);
    CHECK(d.D == 0.0);
}

TEST_CASE("seir_rhs conserves the population with no demography")
{
    std::mt19937 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const StateVec u = random_state(rng);
        const StateVec d = seir_rhs(u, random_theta(rng));
        const double sum = d.S + d.E + d.I + d.R + d.D;
        CHECK(std::abs(sum) <= 1e-12 * u.total());
    }
}

TEST_CASE("seir_rhs demography terms")
{
    const DemographyParams demo{3.0, 0.0, 0.01};
    const StateVec d = seir_rhs(kState, kTheta, demo);
    CHECK(d.S == doctest::Approx(3.0 - 4.95 - 0.01 * 990.0));
    CHECK(d.R == doctest::Approx(1.0));
}

TEST_CASE("seir_rhs rejects invalid input")
{
    CHECK_THROWS_AS(seir_rhs(StateVec{0.0, 0.0, 0.0, 0.0, 5.0}, kTheta), DomainError);
    CHECK_THROWS_AS(seir_rhs(StateVec{1.0 / 0.0, 0.0, 1.0, 0.0, 0.0}, kTheta), DomainError);
    ParamVec bad = kTheta;
    bad.gamma = -0.1;
    CHECK_THROWS_AS(seir_rhs(kState, bad), DomainError);
}

TEST_CASE("jacobian_state entries at I = 0, S = N")
{
    const StateVec u{1000.0, 0.0, 0.0, 0.0, 0.0};
    const StateMatrix j = jacobian_state(u, kTheta);
    CHECK(j[0][0] == 0.0);
    CHECK(j[0][2] == doctest::Approx(-kTheta.beta));
    CHECK(j[2][2] == doctest::Approx(-(kTheta.gamma + kTheta.mu)));
}

TEST_CASE("jacobian_state R and D columns are zero, R and D rows depend on I only")
{
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const StateMatrix j = jacobian_state(random_state(rng), random_theta(rng));
        for (int r = 0; r < 5; ++r) {
            CHECK(j[r][3] == 0.0);
            CHECK(j[r][4] == 0.0);
        }
        for (int c = 0; c < 5; ++c) {
            if (c == 2) continue;
            CHECK(j[3][c] == 0.0);
            CHECK(j[4][c] == 0.0);
        }
    }
}

TEST_CASE("jacobian_state S and I directions match central finite differences")
{
    std::mt19937 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const StateVec u = random_state(rng);
        const ParamVec theta = random_theta(rng);
        const StateMatrix j = jacobian_state(u, theta);
        for (int c : {0, 2}) {
            const double h = 1e-6 * std::max(u.total(), 1.0);
            StateVec up = u, dn = u;
            (c == 0 ? up.S : up.I) += h;
            (c == 0 ? dn.S : dn.I) -= h;
            const StateVec fp = seir_rhs(up, theta);
            const StateVec fm = seir_rhs(dn, theta);
            const double fd[5] = {(fp.S - fm.S) / (2 * h), (fp.E - fm.E) / (2 * h),
                                  (fp.I - fm.I) / (2 * h), (fp.R - fm.R) / (2 * h),
                                  (fp.D - fm.D) / (2 * h)};
            for (int r = 0; r < 5; ++r) {
                const double scale = std::max(std::abs(fd[r]), 1e-8);
                CHECK(std::abs(j[r][c] - fd[r]) / scale <= 1e-5);
            }
        }
    }
}

TEST_CASE("jacobian_state equals finite differences of the full matrix when I = 0")
{
    // With no infectious compartment the bilinear S*I/N terms vanish and the
    // stated matrix is the exact derivative in every direction.
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const StateVec u{1000.0 * unit(rng) + 1.0, 500.0 * unit(rng), 0.0, 500.0 * unit(rng),
                         100.0 * unit(rng)};
        const ParamVec theta = random_theta(rng);
        const StateMatrix j = jacobian_state(u, theta);
        for (int c = 0; c < 5; ++c) {
            const double h = 1e-6 * std::max(u.total(), 1.0);
            StateVec up = u, dn = u;
            double* comps_up[5] = {&up.S, &up.E, &up.I, &up.R, &up.D};
            double* comps_dn[5] = {&dn.S, &dn.E, &dn.I, &dn.R, &dn.D};
            *comps_up[c] += h;
            if (c == 2) {
                dn = u; // keep I >= 0; one-sided difference is exact for the linear rows
            } else {
                *comps_dn[c] -= h;
            }
            const StateVec fp = seir_rhs(up, theta);
            const StateVec fm = seir_rhs(dn, theta);
            const double denom = (c == 2) ? h : 2 * h;
            const double fd[5] = {(fp.S - fm.S) / denom, (fp.E - fm.E) / denom,
                                  (fp.I - fm.I) / denom, (fp.R - fm.R) / denom,
                                  (fp.D - fm.D) / denom};
            for (int r = 0; r < 5; ++r) {
                const double scale = std::max({std::abs(fd[r]), std::abs(j[r][c]), 1e-6});
                CHECK(std::abs(j[r][c] - fd[r]) / scale <= 1e-4);
            }
        }
    }
}

TEST_CASE("jacobian_params beta column and degenerate case")
{
    const ParamMatrix j = jacobian_params(kState);
    CHECK(j[0][0] == doctest::Approx(-9.9));
    CHECK(j[1][0] == doctest::Approx(9.9));
    CHECK(j[2][0] == 0.0);

    const ParamMatrix zero = jacobian_params(StateVec{500.0, 0.0, 0.0, 0.0, 0.0});
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 4; ++c) CHECK(zero[r][c] == 0.0);
}

TEST_CASE("jacobian_params matches central finite differences in theta")
{
    std::mt19937 rng(19);
    for (int trial = 0; trial < 50; ++trial) {
        const StateVec u = random_state(rng);
        const ParamVec theta = random_theta(rng);
        const ParamMatrix j = jacobian_params(u);
        for (int c = 0; c < 4; ++c) {
            const double h = 1e-6 * std::max(std::abs(theta[c]), 1e-2);
            ParamVec up = theta, dn = theta;
            up[c] += h;
            dn[c] = std::max(dn[c] - h, 0.0);
            const StateVec fp = seir_rhs(u, up);
            const StateVec fm = seir_rhs(u, dn);
            const double denom = up[c] - dn[c];
            const double fd[5] = {(fp.S - fm.S) / denom, (fp.E - fm.E) / denom,
                                  (fp.I - fm.I) / denom, (fp.R - fm.R) / denom,
                                  (fp.D - fm.D) / denom};
            for (int r = 0; r < 5; ++r) {
                const double scale = std::max({std::abs(fd[r]), std::abs(j[r][c]), 1e-8});
                CHECK(std::abs(j[r][c] - fd[r]) / scale <= 1e-6);
            }
        }
    }
}

TEST_CASE("hamiltonian examples and identity with the right-hand side")
{
    CHECK(hamiltonian(kState, CostateVec{}, kTheta) == 0.0);
    CHECK(hamiltonian(kState, CostateVec{1.0, 0.0, 0.0, 0.0, 0.0}, kTheta) ==
          doctest::Approx(-4.95));

    std::mt19937 rng(23);
    std::uniform_real_distribution<double> signed_unit(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const StateVec u = random_state(rng);
        const ParamVec theta = random_theta(rng);
        const CostateVec v{signed_unit(rng), signed_unit(rng), signed_unit(rng), signed_unit(rng),
                           signed_unit(rng)};
        const double h = hamiltonian(u, v, theta);
        const double dot = rhs_dot(seir_rhs(u, theta), v);
        CHECK(h == doctest::Approx(dot).epsilon(1e-10));
    }
}

TEST_CASE("hamiltonian is linear in theta")
{
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> signed_unit(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const StateVec u = random_state(rng);
        const CostateVec v{signed_unit(rng), signed_unit(rng), signed_unit(rng), signed_unit(rng),
                           signed_unit(rng)};
        const ParamVec t1 = random_theta(rng);
        const ParamVec t2 = random_theta(rng);
        const double a = unit(rng);
        ParamVec mix;
        for (int c = 0; c < 4; ++c) mix[c] = a * t1[c] + (1.0 - a) * t2[c];
        const double lhs = hamiltonian(u, v, mix);
        const double rhs = a * hamiltonian(u, v, t1) + (1.0 - a) * hamiltonian(u, v, t2);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("r0 value, threshold case, and agreement with sigma at b = 0")
{
    CHECK(r0(kTheta) == doctest::Approx(0.5 / 0.11).epsilon(1e-12));
    CHECK(r0(ParamVec{0.11, 0.2, 0.1, 0.01}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(r0(ParamVec{0.5, 0.2, 0.0, 0.0}), DomainError);

    std::mt19937 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const ParamVec theta = random_theta(rng);
        CHECK(r0(theta) == doctest::Approx(sigma(theta, 0.0)).epsilon(1e-12));
    }
}

TEST_CASE("sigma example and dominance by R0")
{
    CHECK(sigma(kTheta, 0.01) == doctest::Approx(0.5 * 0.2 / (0.21 * 0.12)).epsilon(1e-12));
    CHECK(sigma(kTheta, 0.01) == doctest::Approx(3.968253968253968).epsilon(1e-12));
    CHECK_THROWS_AS(sigma(ParamVec{0.5, 0.0, 0.0, 0.0}, 0.0), DomainError);

    std::mt19937 rng(37);
    std::uniform_real_distribution<double> b_draw(0.0, 0.1);
    for (int trial = 0; trial < 1000; ++trial) {
        const ParamVec theta = random_theta(rng);
        const double b = b_draw(rng);
        CHECK(sigma(theta, b) <= r0(theta) * (1.0 + 1e-12));
    }
}

TEST_CASE("fraction_rhs equilibria and hand-evaluated example")
{
    const FractionState p0{1.0, 0.0, 0.0};
    for (double b : {0.0, 0.02}) {
        const FractionState d = fraction_rhs(p0, kTheta, b);
        CHECK(d.s == 0.0);
        CHECK(d.e == 0.0);
        CHECK(d.i == 0.0);
    }
    const FractionState rest = fraction_rhs(FractionState{0.5, 0.0, 0.0}, kTheta, 0.0);
    CHECK(rest.s == 0.0);
    CHECK(rest.e == 0.0);
    CHECK(rest.i == 0.0);

    const FractionState d = fraction_rhs(FractionState{0.9, 0.05, 0.05}, kTheta, 0.0);
    CHECK(d.s == doctest::Approx(-0.022050).epsilon(1e-10));
    CHECK(d.e == doctest::Approx(0.012525).epsilon(1e-10));
    CHECK(d.i == doctest::Approx(0.004525).epsilon(1e-10));

    CHECK_THROWS_AS(fraction_rhs(FractionState{0.9, 0.2, 0.05}, kTheta, 0.0), DomainError);
}

TEST_CASE("fraction dynamics keep Sigma invariant over long horizons")
{
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> b_draw(0.0, 0.02);
    for (int trial = 0; trial < 25; ++trial) {
        const double s = 0.02 + 0.9 * unit(rng);
        const double e = (1.0 - s) * 0.5 * unit(rng);
        const double i = (1.0 - s - e) * 0.5 * unit(rng);
        const FractionRun run = integrate_fractions(FractionState{s, e, i}, random_theta(rng),
                                                    b_draw(rng), 1000.0, 0.25, 100);
        for (const FractionState& x : run.values) {
            CHECK(x.s >= -1e-9);
            CHECK(x.e >= -1e-9);
            CHECK(x.i >= -1e-9);
            CHECK(x.s + x.e + x.i <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("Lyapunov combination decays when sigma <= 1")
{
    // d/dt [eps*e + (eps+b)*i] <= 0 on Sigma whenever sigma <= 1.
    std::mt19937 rng(43);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> b_draw(0.0, 0.02);
    int checked = 0;
    while (checked < 200) {
        ParamVec theta = random_theta(rng);
        const double b = b_draw(rng);
        if (sigma(theta, b) > 1.0) {
            theta.beta *= 0.9 / sigma(theta, b);
            if (sigma(theta, b) > 1.0) continue;
        }
        const double s = unit(rng);
        const double e = (1.0 - s) * unit(rng);
        const double i = (1.0 - s - e) * unit(rng);
        const FractionState x{s, e, i};
        const FractionState d = fraction_rhs(x, theta, b);
        const double lyap_rate = theta.epsilon * d.e + (theta.epsilon + b) * d.i;
        CHECK(lyap_rate <= 1e-14);
        ++checked;
    }
}
