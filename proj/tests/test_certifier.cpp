#include <gtest/gtest.h>

#include <cmath>

#include "qnls/certifier.hpp"
#include "qnls/error.hpp"

using namespace qnls;

namespace {

double tri(double x, double a0, double a1, double b0, double b1)
{
    // length of [a0, a1] intersect (x - [b0, b1])
    return std::max(0.0, std::min(a1, x - b0) - std::max(a0, x - b1));
}

// brute-force (chi_A * chi_B)(tau, xi) by midpoint sums over xi1 and tau1
double brute_conv(const SpaceTimeSet& A, const SpaceTimeSet& B, double tau, double xi, int m)
{
    const double x0 = A.xi_lo, x1 = A.xi_hi;
    const double dx = (x1 - x0) / m;
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
        const double a = x0 + (i + 0.5) * dx;
        const double t0 = A.phase(a) + A.eta_min(), t1 = A.phase(a) + A.eta_max();
        const double dt = (t1 - t0) / m;
        for (int j = 0; j < m; ++j) {
            const double t = t0 + (j + 0.5) * dt;
            if (A.contains(t, a) && B.contains(tau - t, xi - a)) acc += dx * dt;
        }
    }
    return acc;
}

}  // namespace

TEST(Sets, Construction)
{
    const auto A = make_set(0, 2, Phase{1, 0}, {{-1, 1}, {3, 4}}, "A");
    EXPECT_DOUBLE_EQ(A.eta_measure(), 3.0);
    EXPECT_DOUBLE_EQ(A.area(), 6.0);
    EXPECT_DOUBLE_EQ(A.min_eta_width(), 1.0);
    EXPECT_TRUE(A.contains(1.0 + 3.5, 1.0));
    EXPECT_FALSE(A.contains(1.0 + 2.0, 1.0));
    EXPECT_THROW(make_set(1, 1, Phase{}, {{0, 1}}, "x"), ContractError);
    EXPECT_THROW(make_set(0, 1, Phase{}, {{0, 2}, {1, 3}}, "x"), ContractError);
    EXPECT_THROW(make_set(0, 1, Phase{}, {}, "x"), ContractError);
}

TEST(Families, Geometry)
{
    const auto h = build_counterexample(alpha_half(), 64);
    EXPECT_DOUBLE_EQ(h.A1.xi_lo, -65);
    EXPECT_DOUBLE_EQ(h.A2.xi_hi, 129);
    EXPECT_DOUBLE_EQ(h.A3.xi_lo, 63);
    const auto m = build_counterexample(alpha_mid(0.625), 64);
    EXPECT_NEAR(0.5 * (m.A2.xi_lo + m.A2.xi_hi), 64 * 4.0 / 3.0, 1e-12);
    EXPECT_NEAR(m.A3.xi_width(), 2.0 / 64, 1e-15);
    const auto s = build_counterexample(alpha_small(0.25), 64);
    EXPECT_DOUBLE_EQ(s.A2.eta.front().hi, 7.0);
    EXPECT_DOUBLE_EQ(s.A3.phase.c, -0.75 * 64 * 64);
    const auto e = build_counterexample(alpha_small_endpoint(0.25, 2), 64);
    EXPECT_EQ(e.A1j.size(), 2u);
    EXPECT_EQ(e.A1.eta.size(), 2u);
    EXPECT_THROW(build_counterexample(alpha_small_endpoint(0.25, 3), 64), ContractError);
    EXPECT_THROW(build_counterexample(alpha_half(), 8), ContractError);
    EXPECT_THROW(alpha_mid(0.5), ContractError);
    EXPECT_THROW(alpha_small(0.5), ContractError);
}

TEST(Convolution, RectanglesGiveProductsOfTrapezoids)
{
    const auto A = make_set(0, 2, Phase{0, 0}, {{-1, 1}}, "A");
    const auto B = make_set(3, 3.5, Phase{0, 0}, {{0, 4}}, "B");
    for (double xi : {3.2, 4.0, 5.1}) {
        for (double tau : {-0.5, 1.0, 4.5}) {
            const double want = tri(xi, 0, 2, 3, 3.5) * tri(tau, -1, 1, 0, 4);
            EXPECT_NEAR(conv_at(A, B, Phase{0, 0}, tau, xi, 64), want, 1e-12);
        }
    }
}

TEST(Convolution, ShearedSetsAgainstBruteForce)
{
    const double N = 16;
    const auto A = make_set(-N - 1, -N + 1, Phase{-1, 0}, {{-1, 1}}, "A");
    const auto B = make_set(2 * N - 1, 2 * N + 1, Phase{0.5, 0}, {{-1, 1}, {1.5, 2}}, "B");
    const Phase out{1, 0};
    for (double xi : {N - 0.5, N, N + 0.7}) {
        for (double eta : {-1.0, 0.0, 1.2}) {
            const double got = conv_at(A, B, out, eta, xi, 128);
            const double want = brute_conv(A, B, eta + out(xi), xi, 1200);
            EXPECT_NEAR(got, want, 3e-3) << xi << " " << eta;
        }
    }
}

TEST(Convolution, DiscreteConvolveAgainstDoubleSum)
{
    SpaceTimeField a, b;
    a.nxi = 5;
    a.neta = 4;
    a.dxi = b.dxi = 0.5;
    a.deta = b.deta = 0.25;
    a.xi0 = 1.0;
    a.eta0 = -1.0;
    b.nxi = 3;
    b.neta = 6;
    b.xi0 = 0.5;
    b.eta0 = 2.0;
    a.shear = b.shear = Phase{0, 0};
    for (int i = 0; i < a.nxi * a.neta; ++i) a.data.push_back(std::sin(1.0 + i));
    for (int i = 0; i < b.nxi * b.neta; ++i) b.data.push_back(std::cos(0.3 * i));
    const auto c = discrete_convolve(a, b);
    ASSERT_EQ(c.nxi, 7);
    ASSERT_EQ(c.neta, 9);
    EXPECT_DOUBLE_EQ(c.xi0, 1.5);
    EXPECT_DOUBLE_EQ(c.eta0, 1.0);
    for (int i = 0; i < c.nxi; ++i)
        for (int j = 0; j < c.neta; ++j) {
            double want = 0.0;
            for (int p = 0; p < a.nxi; ++p)
                for (int q = 0; q < a.neta; ++q) {
                    const int r = i - p, s = j - q;
                    if (r < 0 || r >= b.nxi || s < 0 || s >= b.neta) continue;
                    want += a.at(p, q) * b.at(r, s);
                }
            EXPECT_NEAR(c.at(i, j), want * 0.5 * 0.25, 1e-12);
        }
    b.shear = Phase{1, 0};
    EXPECT_THROW(discrete_convolve(a, b), ContractError);
}

TEST(Convolution, SampledFieldMatchesDiscreteConvolutionOfIndicators)
{
    // unsheared rectangles: the quadrature field and the discrete convolution of sampled
    // indicators describe the same function
    const auto A = make_set(0, 1, Phase{0, 0}, {{0, 1}}, "A");
    // two eta pieces, same steps as A once sampled (hull 2.5 over 100 cells)
    const auto B = make_set(0, 1, Phase{0, 0}, {{0, 1}, {1.5, 2.5}}, "B");
    const auto fa = sample_indicator(A, 40), fb = sample_indicator(B, 40);
    const auto d = discrete_convolve(fa, fb);
    for (int i = 5; i < d.nxi; i += 13)
        for (int j = 3; j < d.neta; j += 17) {
            const double exact = conv_at(A, B, Phase{0, 0}, d.eta(j) , d.xi(i), 64);
            EXPECT_NEAR(d.at(i, j), exact, 0.06) << i << " " << j;
        }
}

TEST(Norms, IndicatorNormsInClosedForm)
{
    const auto A = make_set(-3, -1, Phase{-1, 0}, {{-1, 1}}, "A");
    // s = b = 0: square root of the area
    EXPECT_NEAR(xsb_norm_of_set(A, 0, 0, Phase{-1, 0}), 2.0, 1e-12);
    // b = 1 against its own surface: int (1 + eta^2) deta over [-1, 1] is 8/3
    EXPECT_NEAR(xsb_norm_of_set(A, 0, 1, Phase{-1, 0}, 64), std::sqrt(2 * 8.0 / 3.0), 2e-3);
    // s = 1, b = 0: int_{-3}^{-1} (1 + xi^2) dxi = 2 + 26/3, times eta width 2
    EXPECT_NEAR(xsb_norm_of_set(A, 1, 0, Phase{-1, 0}, 64), std::sqrt(2 * (2 + 26.0 / 3.0)), 2e-3);
    // a norm surface shifted by c moves the modulation by c
    const double shifted = xsb_norm_of_set(A, 0, 1, Phase{-1, -10}, 64);
    EXPECT_NEAR(shifted * shifted, 2 * (2 * 1 + (std::pow(11, 3) - std::pow(9, 3)) / 3.0), 0.05);
}

TEST(Norms, CoarseFieldsAreRejected)
{
    const auto A = make_set(0, 1, Phase{1, 0}, {{0, 1}}, "A");
    EXPECT_THROW(xsb_norm(sample_indicator(A, 4), 0, 0, Phase{}), ResolutionError);
    const auto B = make_set(0, 1, Phase{1, 0}, {{0, 1}, {50, 51}}, "B");
    EXPECT_THROW(xsb_norm(convolution_field(A, B, Phase{1, 0}, 20, 20, 16), 0, 0, Phase{}), ResolutionError);
}

TEST(Membership, DilationIsIndependentOfN)
{
    for (const Regime& r : {alpha_half(), alpha_mid(0.625), alpha_small(0.25)}) {
        const auto f64 = build_counterexample(r, 64), f1k = build_counterexample(r, 1024);
        const double k64 = membership_dilation(f64.A3, f64.A1, f64.A2);
        const double k1k = membership_dilation(f1k.A3, f1k.A1, f1k.A2);
        EXPECT_LE(k64, 4.0 + 1e-6) << to_string(r.kind);
        EXPECT_NEAR(k64, k1k, 1e-3) << to_string(r.kind);
    }
}

TEST(Membership, SmallAlphaWindowLandsExactly)
{
    // modulation part for the restricted first set is |eta| <= 1 + 3C/2 exactly; check directly
    const double N = 256, C = 4, alpha = 0.25;
    const auto f = build_counterexample(alpha_small(alpha, C), N);
    double worst = 0.0;
    for (int i = 0; i <= 8; ++i)
        for (int j = 0; j <= 8; ++j)
            for (int p = 0; p <= 8; ++p)
                for (int q = 0; q <= 8; ++q) {
                    const double xi = f.A3.xi_lo + f.A3.xi_width() * i / 8;
                    const double tau = f.A3.phase(xi) + C * j / 8;
                    const double xi1 = -N - 1 / N + 0.5 / N * p / 8;
                    const double tau1 = -xi1 * xi1 - 1 + 2.0 * q / 8;
                    const double eta2 = (tau - tau1) - alpha * (xi - xi1) * (xi - xi1);
                    worst = std::max(worst, std::abs(eta2));
                }
    // sampling the edges of A1 gives 1 + 3C/2 up to terms of order 1/N
    EXPECT_LE(worst, 1 + 1.5 * C + 4 / N);
    EXPECT_GT(worst, 0.5 * (1 + 1.5 * C));
}

TEST(Sweep, SlopesAndResolutionInvariance)
{
    CertifyResolution coarse{96, 96, 64, 32};
    CertifyResolution fine{192, 192, 128, 64};
    const std::vector<double> Ns{64, 128, 256, 512};
    const auto a = ratio_sweep(alpha_half(), -0.25, 0.5, Ns, coarse);
    const auto b = ratio_sweep(alpha_half(), -0.25, 0.5, Ns, fine);
    EXPECT_NEAR(a.front().slope, 0.25, 0.03);
    EXPECT_NEAR(a.front().slope, b.front().slope, 0.02);
    const auto m = ratio_sweep(alpha_mid(0.625), -0.75, 0.5, Ns, coarse);
    EXPECT_NEAR(m.front().slope, 0.25, 0.03);
    const auto s = ratio_sweep(alpha_small(0.25), -0.25, 0.5, Ns, coarse);
    EXPECT_NEAR(s.front().slope, 2 * 0.5 - 2.5 + 0.5, 0.05);
    EXPECT_EQ(a.size(), 4u);
    EXPECT_EQ(a[2].regime, "alpha-half");
    EXPECT_THROW(ratio_sweep(alpha_half(), 0, 0.5, {64, 128, 256}), ContractError);
    EXPECT_THROW(ratio_sweep(alpha_half(), 0, 0.5, {64, 100, 256, 512}), ContractError);
    EXPECT_THROW(ratio_sweep(alpha_small_endpoint(0.25, 1), 0, 0.5, Ns), ContractError);
}

TEST(Endpoint, RatiosMatchTheDirectFormula)
{
    const auto r = endpoint_ratios(50);
    for (int m : {1, 2, 7, 50}) {
        double s1 = 1, s2 = 1;
        for (int j = 0; j < m; ++j) {
            s1 += 1.0 / (1 + j);
            s2 += 1.0 / ((1.0 + j) * (1.0 + j));
        }
        EXPECT_NEAR(r[static_cast<std::size_t>(m - 1)], s1 / s2, 1e-14);
        EXPECT_DOUBLE_EQ(endpoint_check(m), r[static_cast<std::size_t>(m - 1)]);
    }
    for (std::size_t i = 1; i < r.size(); ++i) EXPECT_GT(r[i], r[i - 1]);
    EXPECT_THROW(endpoint_ratios(0), ContractError);
}
