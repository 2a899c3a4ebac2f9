#include "qnls/spectral_core.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qnls/error.hpp"
#include "qnls/fft.hpp"

namespace qnls {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void same_grid(const SpectralField& a, const SpectralField& b, const char* op)
{
    if (!(a.grid == b.grid)) throw ContractError(std::string(op) + ": fields live on different grids");
}

// slot-ordered coefficients (k = -n/2..n/2-1) into a length-M FFT buffer, zero padded
void to_fft_order(const SpectralField& f, cvec& buf, int M)
{
    const int n = f.grid.n;
    buf.assign(static_cast<std::size_t>(M), cplx{});
    for (int k = -n / 2; k < n / 2; ++k) {
        const int q = k >= 0 ? k : k + M;
        buf[static_cast<std::size_t>(q)] = f.at(k);
    }
}

}  // namespace

std::vector<double> FourierGrid::frequencies() const
{
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) out[static_cast<std::size_t>(s)] = xi(mode(s));
    return out;
}

FourierGrid make_grid(double L, int n)
{
    if (!(L > 0.0) || !std::isfinite(L)) throw ContractError("make_grid: L must be positive, got " + std::to_string(L));
    if (!power_of_two(n) || n < 8)
        throw ContractError("make_grid: n must be a power of two >= 8, got " + std::to_string(n));
    FourierGrid g;
    g.L = L;
    g.n = n;
    g.dx = L / n;
    g.dxi = 2.0 * std::numbers::pi / L;
    return g;
}

SpectralField::SpectralField(const FourierGrid& g, cvec c) : grid(g), coeffs(std::move(c))
{
    if (static_cast<int>(coeffs.size()) != g.n)
        throw ContractError("SpectralField: expected " + std::to_string(g.n) + " coefficients, got " +
                            std::to_string(coeffs.size()));
}

cplx SpectralField::conj_at(int k) const
{
    const int r = -k;
    if (r > grid.kmax()) return {};
    return std::conj(at(r));
}

SpectralField forward(const FourierGrid& g, const cvec& samples)
{
    if (static_cast<int>(samples.size()) != g.n)
        throw ContractError("forward: expected " + std::to_string(g.n) + " samples, got " +
                            std::to_string(samples.size()));
    cvec buf = samples;
    fft::execute(buf.data(), g.n, -1);
    SpectralField f(g);
    for (int k = g.kmin(); k <= g.kmax(); ++k) {
        const int q = k >= 0 ? k : k + g.n;
        f.at(k) = g.dx * buf[static_cast<std::size_t>(q)];
    }
    return f;
}

cvec inverse(const SpectralField& f)
{
    const auto& g = f.grid;
    if (static_cast<int>(f.coeffs.size()) != g.n)
        throw ContractError("inverse: coefficient count does not match grid");
    cvec buf;
    to_fft_order(f, buf, g.n);
    fft::execute(buf.data(), g.n, +1);
    const double w = g.measure();
    for (auto& z : buf) z *= w;
    return buf;
}

cvec inverse_padded(const SpectralField& f, int M)
{
    require(M >= f.grid.n, "inverse_padded: M must be at least n");
    cvec buf;
    to_fft_order(f, buf, M);
    fft::execute(buf.data(), M, +1);
    const double w = f.grid.measure();
    for (auto& z : buf) z *= w;
    return buf;
}

SpectralField conjugate(const SpectralField& f)
{
    SpectralField out(f.grid);
    for (int k = f.grid.kmin(); k <= f.grid.kmax(); ++k) out.at(k) = f.conj_at(k);
    return out;
}

SpectralField convolve(const SpectralField& f, const SpectralField& g)
{
    same_grid(f, g, "convolve");
    const auto& grid = f.grid;
    const int n = grid.n;
    const int M = 3 * n / 2;
    cvec a, b;
    to_fft_order(f, a, M);
    to_fft_order(g, b, M);
    fft::execute(a.data(), M, +1);
    fft::execute(b.data(), M, +1);
    for (int j = 0; j < M; ++j) a[static_cast<std::size_t>(j)] *= b[static_cast<std::size_t>(j)];
    fft::execute(a.data(), M, -1);
    // (dxi/2pi) sum_{k1+k2=k} f^(k1) g^(k2); the two backward transforms and the
    // forward one contribute 1/M, cancelled here.
    const double w = grid.measure() / M;
    SpectralField out(grid);
    for (int k = -n / 2; k < n / 2; ++k) {
        const int q = k >= 0 ? k : k + M;
        out.at(k) = w * a[static_cast<std::size_t>(q)];
    }
    return out;
}

double l2_norm(const SpectralField& f) { return weighted_norm(f, 0.0, false); }

double inner_real(const SpectralField& f, const SpectralField& g)
{
    same_grid(f, g, "inner_real");
    double acc = 0.0;
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) acc += std::real(f.coeffs[i] * std::conj(g.coeffs[i]));
    return acc * f.grid.measure();
}

double weighted_norm(const SpectralField& f, double s, bool homogeneous)
{
    const auto& g = f.grid;
    double acc = 0.0;
    for (int k = g.kmin(); k <= g.kmax(); ++k) {
        const double a2 = std::norm(f.at(k));
        if (a2 == 0.0) continue;
        const double xi = g.xi(k);
        double w;
        if (homogeneous) {
            if (k == 0) {
                if (s < 0.0) continue;
                w = s == 0.0 ? 1.0 : 0.0;
            } else {
                w = std::pow(std::abs(xi), 2.0 * s);
            }
        } else {
            w = std::pow(1.0 + xi * xi, s);
        }
        acc += w * a2;
    }
    return std::sqrt(acc * g.measure());
}

SpectralField dyadic_project(const SpectralField& f, double Nj)
{
    if (!(Nj >= 1.0) || std::exp2(std::round(std::log2(Nj))) != Nj)
        throw ContractError("dyadic_project: N_j must be a power of two >= 1");
    SpectralField out(f.grid);
    for (int k = f.grid.kmin(); k <= f.grid.kmax(); ++k) {
        const double a = std::abs(f.grid.xi(k));
        const bool keep = Nj == 1.0 ? a < 2.0 : (a >= Nj && a < 2.0 * Nj);
        if (keep) out.at(k) = f.at(k);
    }
    return out;
}

SpectralField operator+(const SpectralField& a, const SpectralField& b)
{
    same_grid(a, b, "operator+");
    SpectralField out(a.grid);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) out.coeffs[i] = a.coeffs[i] + b.coeffs[i];
    return out;
}

SpectralField operator-(const SpectralField& a, const SpectralField& b)
{
    same_grid(a, b, "operator-");
    SpectralField out(a.grid);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) out.coeffs[i] = a.coeffs[i] - b.coeffs[i];
    return out;
}

SpectralField operator*(cplx c, const SpectralField& a)
{
    SpectralField out(a.grid);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) out.coeffs[i] = c * a.coeffs[i];
    return out;
}

void zero_nyquist(SpectralField& f) { f.at(f.grid.kmin()) = 0.0; }

}  // namespace qnls
