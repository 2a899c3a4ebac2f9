#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qnls/error.hpp"
#include "qnls/evolution.hpp"
#include "qnls/functionals.hpp"
#include "qnls/parallel.hpp"
#include "qnls/rng.hpp"

using namespace qnls;

namespace {

constexpr double pi = std::numbers::pi;

SpectralField random_field(const FourierGrid& g, std::uint64_t seed)
{
    Rng r(seed);
    SpectralField f(g);
    for (auto& z : f.coeffs) z = {r.normal(), r.normal()};
    return f;
}

// independent oracle: loops over all mode tuples, tests the hyperplane and the sum masks directly
cplx brute(const std::function<cplx(const double*)>& M, const std::vector<SpectralField>& f, const Pattern& p,
           const std::vector<unsigned>& masks = {})
{
    const auto& g = f[0].grid;
    const int K = static_cast<int>(f.size());
    const int n = g.n;
    auto coeff = [&](int j, int k) {
        if (!p[static_cast<std::size_t>(j)]) return f[static_cast<std::size_t>(j)].at(k);
        return -k > g.kmax() ? cplx{} : std::conj(f[static_cast<std::size_t>(j)].at(-k));
    };
    long long total = 1;
    for (int j = 0; j < K; ++j) total *= n;
    cplx acc{};
    std::vector<int> k(static_cast<std::size_t>(K));
    std::vector<double> xi(static_cast<std::size_t>(K));
    for (long long idx = 0; idx < total; ++idx) {
        long long r = idx;
        int sum = 0;
        for (int j = 0; j < K; ++j) {
            k[static_cast<std::size_t>(j)] = static_cast<int>(r % n) + g.kmin();
            r /= n;
            sum += k[static_cast<std::size_t>(j)];
        }
        if (sum != 0) continue;
        bool ok = true;
        for (unsigned m : masks) {
            int s = 0;
            for (int j = 0; j < K; ++j)
                if (m & (1u << j)) s += k[static_cast<std::size_t>(j)];
            ok = ok && s > g.kmin() && s <= g.kmax();
        }
        if (!ok) continue;
        cplx prod = 1.0;
        for (int j = 0; j < K; ++j) {
            xi[static_cast<std::size_t>(j)] = g.xi(k[static_cast<std::size_t>(j)]);
            prod *= coeff(j, k[static_cast<std::size_t>(j)]);
        }
        acc += M(xi.data()) * prod;
    }
    return acc * std::pow(1.0 / g.L, K - 1);
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(Lambda, MatchesBruteForceForK234)
{
    const auto g = make_grid(2 * pi, 16);
    std::vector<SpectralField> f;
    for (int j = 0; j < 4; ++j) f.push_back(random_field(g, 10 + j));
    auto poly = [](const double* x) { return cplx(1.0 + x[0] * x[0], 0.3 * x[1]); };
    for (int K : {2, 3, 4}) {
        Multiplier M;
        M.arity = K;
        M.eval = poly;
        const std::vector<SpectralField> sub(f.begin(), f.begin() + K);
        Pattern p(static_cast<std::size_t>(K), false);
        p[1] = true;
        FieldRefs refs(sub.begin(), sub.end());
        EXPECT_LT(rel(lambda_k(M, refs, p), brute(poly, sub, p)), 1e-10) << "K = " << K;
    }
}

TEST(Lambda, GridSumMasksAreEnforced)
{
    const auto g = make_grid(3.0, 16);
    std::vector<SpectralField> f;
    for (int j = 0; j < 4; ++j) f.push_back(random_field(g, 30 + j));
    Multiplier M3;
    M3.arity = 3;
    M3.eval = [](const double* x) { return cplx(x[0] - 2.0 * x[1] + 0.5 * x[2] * x[2], 1.0); };
    const Multiplier M4 = elongate(M3, 2, 1);
    ASSERT_EQ(M4.arity, 4);
    ASSERT_EQ(M4.grid_sums.size(), 1u);
    EXPECT_EQ(M4.grid_sums[0], 0b0110u);
    const Pattern p{false, true, false, true};
    auto direct = [](const double* x) { return cplx(x[0] - 2.0 * (x[1] + x[2]) + 0.5 * x[3] * x[3], 1.0); };
    FieldRefs refs(f.begin(), f.end());
    const cplx got = lambda_k(M4, refs, p);
    EXPECT_LT(rel(got, brute(direct, f, p, {0b0110u})), 1e-10);
    // without the mask the sums differ, so the mask matters here
    EXPECT_GT(rel(got, brute(direct, f, p)), 1e-6);
    EXPECT_LT(rel(lambda4_paired(M3, refs, p, 2, 3), got), 1e-10);
}

TEST(Lambda, ElongationMasksCompose)
{
    const Multiplier m = elongate(elongate(constant_multiplier(3, 1.0), 3, 1), 1, 2);
    EXPECT_EQ(m.arity, 6);
    // first: slots 3,4; after widening slot 1 to 1..3 those move to 5,6
    ASSERT_EQ(m.grid_sums.size(), 2u);
    EXPECT_EQ(m.grid_sums[0], 0b110000u);
    EXPECT_EQ(m.grid_sums[1], 0b000111u);
    double xi[6] = {1, 2, 3, 4, 5, 6};
    EXPECT_EQ(m.eval(xi), cplx(1.0));
    EXPECT_THROW(elongate(m, 7, 0), ContractError);
    EXPECT_THROW(elongate(m, 1, 3), ContractError);
}

TEST(Lambda, PairedEvaluationMatchesDirectR4Shape)
{
    const auto g = make_grid(2 * pi, 16);
    std::vector<SpectralField> f;
    for (int j = 0; j < 4; ++j) f.push_back(random_field(g, 50 + j));
    Multiplier M3;
    M3.arity = 3;
    M3.eval = [](const double* y) { return cplx(std::cos(y[0]) + y[1] * y[2], y[1]); };
    Multiplier M4;
    M4.arity = 4;
    M4.eval = [](const double* x) { return cplx(std::cos(x[0]) + (x[1] + x[3]) * x[2], x[1] + x[3]); };
    M4.grid_sums = {0b1010u};
    const Pattern p{false, true, false, true};
    FieldRefs refs(f.begin(), f.end());
    EXPECT_LT(rel(lambda4_paired(M3, refs, p, 2, 4), lambda_k(M4, refs, p)), 1e-10);
    EXPECT_THROW(lambda4_paired(M4, refs, p, 2, 4), ContractError);
    EXPECT_THROW(lambda4_paired(M3, refs, p, 3, 2), ContractError);
}

TEST(Lambda, ContractChecks)
{
    const auto g = make_grid(1.0, 8);
    SpectralField a(g), b(make_grid(2.0, 8));
    const auto one = constant_multiplier(2, 1.0);
    EXPECT_THROW(lambda_k(one, {a, b}, {false, false}), ContractError);
    EXPECT_THROW(lambda_k(one, {a, a, a}, {false, false, false}), ContractError);
    EXPECT_THROW(lambda_k(constant_multiplier(1, 1.0), {a}, {false}), ContractError);
}

TEST(Lambda, IndependentOfThreadCount)
{
    const auto g = make_grid(2 * pi, 32);
    const auto a = random_field(g, 1), b = random_field(g, 2);
    Multiplier M;
    M.arity = 3;
    M.eval = [](const double* x) { return cplx(std::sin(x[0]) * x[1], x[2]); };
    set_thread_count(1);
    const cplx one = lambda_k(M, {a, b, a}, {false, true, false});
    set_thread_count(3);
    const cplx three = lambda_k(M, {a, b, a}, {false, true, false});
    set_thread_count(1);
    EXPECT_EQ(one, three);
}

TEST(Conserved, MassForms)
{
    const auto g = make_grid(32 * pi, 64);
    DataSpec d;
    d.band = 20;
    const auto s = random_state(g, 0.4, d);
    EXPECT_NEAR(mass(s), 1.5, 1e-13);
    EXPECT_NEAR(mass_lambda_form(s), mass(s), 1e-12);
}

TEST(Conserved, EnergyAgainstQuadratureAndLambdaForm)
{
    const auto g = make_grid(6.0, 32);
    Rng r(4);
    SpectralField u(g), v(g);
    for (int k = -15; k <= 15; ++k) {
        u.at(k) = {r.normal(), r.normal()};
        v.at(k) = {r.normal(), r.normal()};
    }
    const auto s = make_state(u, v, 0.35);
    // oracle: trigonometric polynomials and their derivatives summed on a fine grid (exact for
    // band 15 cubic products once the grid has more than 45 points per period)
    const int P = 97;
    double want = 0.0;
    for (int j = 0; j < P; ++j) {
        const double x = j * g.L / P;
        cplx uu{}, vv{}, ux{}, vx{};
        for (int k = -15; k <= 15; ++k) {
            const cplx e = std::polar(1.0, g.xi(k) * x) / g.L;
            uu += u.at(k) * e;
            vv += v.at(k) * e;
            ux += cplx(0, g.xi(k)) * u.at(k) * e;
            vx += cplx(0, g.xi(k)) * v.at(k) * e;
        }
        want += std::norm(ux) + 0.35 * std::norm(vx) + std::real(std::conj(vv) * uu * uu);
    }
    want *= g.L / P;
    EXPECT_NEAR(energy(s), want, 1e-11 * std::abs(want));
    EXPECT_NEAR(energy_lambda_form(s), want, 1e-11 * std::abs(want));
}
