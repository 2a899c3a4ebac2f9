#pragma once

#include <complex>
#include <vector>

namespace qnls {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

// Periodic box [0, L) with n samples. Mode k in [-n/2, n/2) has frequency xi_k = 2 pi k / L.
struct FourierGrid {
    double L = 0.0;
    int n = 0;
    double dx = 0.0;
    double dxi = 0.0;

    int kmin() const { return -n / 2; }
    int kmax() const { return n / 2 - 1; }
    // storage slot of mode k
    int slot(int k) const { return k + n / 2; }
    int mode(int slot) const { return slot - n / 2; }
    double xi(int k) const { return dxi * k; }
    double x(int j) const { return dx * j; }
    // weight dxi / 2pi carried by the inverse transform and every frequency sum
    double measure() const { return 1.0 / L; }
    std::vector<double> frequencies() const;

    bool operator==(const FourierGrid& o) const { return n == o.n && L == o.L; }
};

FourierGrid make_grid(double L, int n);

// Fourier coefficients f^(xi_k) = dx * sum_j f(x_j) e^{-i xi_k x_j}, stored by slot.
struct SpectralField {
    FourierGrid grid;
    cvec coeffs;

    SpectralField() = default;
    explicit SpectralField(const FourierGrid& g) : grid(g), coeffs(static_cast<std::size_t>(g.n)) {}
    SpectralField(const FourierGrid& g, cvec c);

    cplx& at(int k) { return coeffs[static_cast<std::size_t>(grid.slot(k))]; }
    const cplx& at(int k) const { return coeffs[static_cast<std::size_t>(grid.slot(k))]; }
    // coefficient of the conjugate field: conj(f^(-xi)). The reflection of the
    // Nyquist mode leaves the band and is treated as zero.
    cplx conj_at(int k) const;
};

SpectralField forward(const FourierGrid& g, const cvec& samples);
cvec inverse(const SpectralField& f);
// samples of the trigonometric interpolant at x_j = j L / M, M >= n
cvec inverse_padded(const SpectralField& f, int M);

// spectrum of the conjugate field under the same reflection rule as conj_at
SpectralField conjugate(const SpectralField& f);

// Spectrum of the pointwise product f g restricted to the grid band, computed with 3/2
// zero padding so no product mode wraps into the band.
SpectralField convolve(const SpectralField& f, const SpectralField& g);

double l2_norm(const SpectralField& f);
double inner_real(const SpectralField& f, const SpectralField& g);
// (sum w(xi)^{2s} |f^|^2 dxi/2pi)^{1/2}, w = <xi> or |xi| (zero mode dropped when |xi|^s is singular)
double weighted_norm(const SpectralField& f, double s, bool homogeneous);

// keeps N_j <= |xi| < 2 N_j; the N_j = 1 block is |xi| < 2
SpectralField dyadic_project(const SpectralField& f, double Nj);

SpectralField operator+(const SpectralField& a, const SpectralField& b);
SpectralField operator-(const SpectralField& a, const SpectralField& b);
SpectralField operator*(cplx c, const SpectralField& a);

void zero_nyquist(SpectralField& f);

}  // namespace qnls
