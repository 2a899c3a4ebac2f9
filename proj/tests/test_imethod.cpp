#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qnls/error.hpp"
#include "qnls/evolution.hpp"
#include "qnls/imethod.hpp"
#include "qnls/rng.hpp"

using namespace qnls;

namespace {

constexpr double pi = std::numbers::pi;

FieldPair state(int n, int band, double alpha, std::uint64_t seed, double envelope = 0.0)
{
    DataSpec d;
    d.seed = seed;
    d.band = band;
    d.envelope = envelope;
    return random_state(make_grid(2 * pi, n), alpha, d);
}

}  // namespace

TEST(Multiplier, PiecesAndContinuity)
{
    const auto I = make_imultiplier(16, 0.5);
    EXPECT_EQ(m_eval(I, 0.0), 1.0);
    EXPECT_EQ(m_eval(I, -16.0), 1.0);
    EXPECT_DOUBLE_EQ(m_eval(I, 32.0), std::sqrt(0.5));
    EXPECT_DOUBLE_EQ(m_eval(I, -100.0), std::pow(0.16, 0.5));
    for (double x : {16.0, 32.0}) {
        EXPECT_NEAR(m_eval(I, x * (1 + 1e-9)), m_eval(I, x * (1 - 1e-9)), 1e-8);
        EXPECT_NEAR(m_log_slope(I, x * (1 + 1e-9)), m_log_slope(I, x * (1 - 1e-9)), 1e-6);
    }
    EXPECT_THROW(make_imultiplier(0.5, 0.5), ContractError);
    EXPECT_THROW(make_imultiplier(4, 0.0), ContractError);
}

TEST(Multiplier, SlopeIsTheLogDerivative)
{
    const auto I = make_imultiplier(8, 0.4);
    double worst = 0.0;
    for (double x = 8.01; x < 16.0; x += 0.05) {
        const double h = 1e-6;
        const double fd = (std::log(m_eval(I, x * std::exp(h))) - std::log(m_eval(I, x * std::exp(-h)))) / (2 * h);
        EXPECT_NEAR(m_log_slope(I, x), fd, 1e-7);
        worst = std::min(worst, m_log_slope(I, x));
    }
    // monotone blend with steepest log slope 1.512 rho
    EXPECT_LE(worst, 0.0);
    EXPECT_GT(worst, -1.513 * 0.4);
    EXPECT_LT(worst, -1.50 * 0.4);
}

TEST(Multiplier, NonIncreasingAndQuasiMonotoneWeight)
{
    const auto I = make_imultiplier(32, 0.5);
    double prev = 2.0, lo = INFINITY, hi = 0.0;
    for (double x = 0.0; x < 500.0; x += 0.25) {
        const double m = m_eval(I, x);
        EXPECT_LE(m, prev);
        prev = m;
        const double w = m * std::pow(1.0 + x * x, 0.25);
        if (x >= 32.0) {
            lo = std::min(lo, w);
            hi = std::max(hi, w);
        }
    }
    // m <xi>^rho is not monotone (it must dip between N and 2N for any m of this shape) but it
    // stays within a fixed factor of N^rho
    EXPECT_LT(m_eval(I, 64) * std::pow(1 + 64.0 * 64, 0.25), std::pow(1 + 32.0 * 32, 0.25));
    EXPECT_GT(lo / hi, 0.5);
}

TEST(Sigma3, VanishesAtLowFrequencyAndRejectsResonantAlpha)
{
    const auto I = make_imultiplier(8, 0.5);
    EXPECT_EQ(sigma3_eval(I, 0.25, 3, -7, 4), cplx{});
    const cplx s = sigma3_eval(I, 0.25, 30, -20, -10);
    const double m1 = m_eval(I, 30), m2 = m_eval(I, -20);
    EXPECT_NEAR(s.imag(), (m1 * m1 - m2 * m2) / (900 - 0.25 * 400 + 100), 1e-15);
    EXPECT_EQ(s.real(), 0.0);
    EXPECT_THROW(sigma3_eval(I, 0.5, 1, -1, 0), RegimeError);
    EXPECT_THROW(sigma3_multiplier(I, 0.7), RegimeError);
    EXPECT_THROW(r4_multipliers(I, 0.5), RegimeError);
}

TEST(ModifiedEnergies, E2AndE3Definitions)
{
    const auto s = state(64, 24, 0.25, 3, 1.0);
    const auto I = make_imultiplier(4, 0.5);
    // E2 from the definition
    double want = 0.0;
    for (int k = -32; k < 32; ++k) {
        const double m = m_eval(I, k);
        want += m * m * (0.5 * std::norm(s.u.at(k)) + std::norm(s.v.at(k)));
    }
    want /= 2 * pi;
    EXPECT_NEAR(modified_mass_e2(s, I), want, 1e-13);
    // cutoff above the band: E2 is the mass and E3 adds nothing
    const auto big = make_imultiplier(64, 0.5);
    EXPECT_NEAR(modified_mass_e2(s, big), mass(s), 1e-13);
    EXPECT_NEAR(modified_mass_e3(s, big), mass(s), 1e-13);

    // E3 - E2 against a direct triple sum
    cplx corr{};
    for (int k1 = -31; k1 < 32; ++k1)
        for (int k3 = -31; k3 < 32; ++k3) {
            const int k2 = -k1 - k3;
            if (k2 < -31 || k2 > 31) continue;
            corr += sigma3_eval(I, 0.25, k1, k2, k3) * s.u.at(k1) * std::conj(s.v.at(-k2)) * s.u.at(k3);
        }
    corr /= (2 * pi) * (2 * pi);
    EXPECT_NEAR(modified_mass_e3(s, I) - modified_mass_e2(s, I), corr.imag(), 1e-12);
}

TEST(ModifiedEnergies, FastAndDirectQuarticAgree)
{
    const auto s = state(32, 12, 0.25, 8);
    const auto I = make_imultiplier(4, 0.5);
    const double fast = e3_derivative(s, I, true), slow = e3_derivative(s, I, false);
    EXPECT_NEAR(fast, slow, 1e-11 * std::abs(slow));
    EXPECT_NE(slow, 0.0);
}

TEST(ModifiedEnergies, DerivativeIdentitiesConverge)
{
    // the identity residuals shrink at second order when the time step and the difference step
    // are refined together
    // band 8 keeps k^2 dt small enough to be asymptotic; at band 20 a third-order transient
    // lasts down to dt ~ 1e-5
    const auto s = state(64, 8, 0.25, 2);
    const auto I = make_imultiplier(4, 0.5);
    std::vector<double> e2, e3;
    for (double dt : {2e-4, 1e-4, 5e-5}) {
        EvolveOptions o;
        o.T = 2 * dt;
        o.dt = dt;
        const auto traj = strang_evolve(s, o);
        e2.push_back(derivative_residuals(traj, I, Functional::E2).at(0).residual);
        e3.push_back(derivative_residuals(traj, I, Functional::E3).at(0).residual);
    }
    for (int i = 0; i < 2; ++i) {
        EXPECT_NEAR(std::log2(e2[i] / e2[i + 1]), 2.0, 0.3) << e2[i];
        EXPECT_NEAR(std::log2(e3[i] / e3[i + 1]), 2.0, 0.3);
    }
}

TEST(ModifiedEnergies, ResidualContracts)
{
    const auto s = state(16, 4, 0.7, 1);
    EvolveOptions o;
    o.T = 0.001;
    o.dt = 0.001;
    const auto traj = strang_evolve(s, o);
    EXPECT_THROW(derivative_residuals(traj, make_imultiplier(2, 0.5), Functional::E2), ContractError);
    o.T = 0.002;
    EXPECT_THROW(derivative_residuals(strang_evolve(s, o), make_imultiplier(2, 0.5), Functional::E3), RegimeError);
}

TEST(Sweep, ShapeAndContracts)
{
    SweepConfig c;
    c.n = 64;
    c.N_list = {2, 4, 8};
    c.dt = 1e-4;
    c.delta = 1e-3;
    c.data.band = 24;
    c.data.envelope = 1.0;
    const auto r = almost_conservation_sweep(c);
    ASSERT_EQ(r.records.size(), 3u);
    EXPECT_EQ(r.records[1].N, 4.0);
    EXPECT_EQ(r.records[2].n, 64);
    EXPECT_EQ(r.records[0].fitted_gamma, r.gamma);
    EXPECT_GT(r.records[0].e2_increment, 0.0);
    c.N_list = {2, 4};
    EXPECT_THROW(almost_conservation_sweep(c), ContractError);
    c.N_list = {2, 4, 8};
    c.alpha = 0.5;
    EXPECT_THROW(almost_conservation_sweep(c), RegimeError);
}
