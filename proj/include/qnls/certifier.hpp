#pragma once

#include <string>
#include <vector>

#include "qnls/spectral_core.hpp"

namespace qnls {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

// tau = a xi^2 + c is the reference surface of a set or a norm
struct Phase {
    double a = 1.0;
    double c = 0.0;
    double operator()(double xi) const { return a * xi * xi + c; }
};

// {(tau, xi): xi in [xi_lo, xi_hi], tau - phase(xi) in one of the eta intervals}
struct SpaceTimeSet {
    double xi_lo = 0.0;
    double xi_hi = 0.0;
    Phase phase{};
    std::vector<Interval> eta;  // disjoint, increasing
    std::string tag;

    double xi_width() const { return xi_hi - xi_lo; }
    double eta_measure() const;
    double area() const { return xi_width() * eta_measure(); }
    double eta_min() const { return eta.front().lo; }
    double eta_max() const { return eta.back().hi; }
    double min_eta_width() const;
    bool contains(double tau, double xi, double tol = 0.0) const;
};

SpaceTimeSet make_set(double xi_lo, double xi_hi, Phase phase, std::vector<Interval> eta, std::string tag);

enum class RegimeKind { AlphaHalf, AlphaMid, AlphaSmall, AlphaSmallEndpoint };

struct Regime {
    RegimeKind kind = RegimeKind::AlphaHalf;
    double alpha = 0.5;
    double beta = 0.0;  // alpha_half only: xi widths N^{-beta}
    int m = 0;          // endpoint only
    double C = 4.0;     // alpha_small window constant
};

Regime alpha_half(double beta = 0.0);
Regime alpha_mid(double alpha);
Regime alpha_small(double alpha, double C = 4.0);
Regime alpha_small_endpoint(double alpha, int m);
std::string to_string(RegimeKind k);

// A1 carries the spectrum of conj(u) (norm surface tau = -xi^2), A2 that of v
// (tau = alpha xi^2), A3 the region where the product is claimed large (tau = xi^2).
// For the endpoint family A1, A2 are A_{1,m}, A_{2,m} and the j < m pieces are listed.
struct CounterexampleFamily {
    Regime regime;
    double N = 0.0;
    SpaceTimeSet A1, A2, A3;
    std::vector<SpaceTimeSet> A1j, A2j;
    Phase u_phase{-1.0, 0.0};
    Phase v_phase{};
    Phase out_phase{1.0, 0.0};
};

CounterexampleFamily build_counterexample(const Regime& r, double N);

// Samples on the (xi, eta) grid xi_i = xi0 + i dxi, eta_j = eta0 + j deta, with
// tau = eta + shear(xi). Row-major in xi.
struct SpaceTimeField {
    double xi0 = 0.0, dxi = 1.0;
    int nxi = 0;
    double eta0 = 0.0, deta = 1.0;
    int neta = 0;
    Phase shear{0.0, 0.0};
    std::vector<double> data;
    double min_samples_per_width = 0.0;  // resolution of the narrowest feature

    double& at(int i, int j) { return data[static_cast<std::size_t>(i) * neta + j]; }
    double at(int i, int j) const { return data[static_cast<std::size_t>(i) * neta + j]; }
    double xi(int i) const { return xi0 + i * dxi; }
    double eta(int j) const { return eta0 + j * deta; }
};

constexpr double min_samples_required = 8.0;

// cell-centred samples of the indicator over its bounding box
SpaceTimeField sample_indicator(const SpaceTimeSet& A, int samples_per_width);

// (sum <xi>^{2s} <tau - phase(xi)>^{2b} |f|^2 dxi deta)^{1/2}; the shear has unit Jacobian
double xsb_norm(const SpaceTimeField& f, double s, double b, const Phase& phase);

// X^{s,b} norm of a set indicator, every eta piece sampled on its own grid
double xsb_norm_of_set(const SpaceTimeSet& A, double s, double b, const Phase& phase, int samples_per_width = 32);

// (chi_A * chi_B)(tau, xi) with tau = eta + out(xi): exact overlap length in tau_1 for each
// xi_1, composite 4-point Gauss-Legendre over xi_1
double conv_at(const SpaceTimeSet& A, const SpaceTimeSet& B, const Phase& out, double eta, double xi,
               int panels = 64);

// chi_A * chi_B sampled over the bounding box of its support, sheared along out
SpaceTimeField convolution_field(const SpaceTimeSet& A, const SpaceTimeSet& B, const Phase& out, int nxi, int neta,
                                 int panels = 64);

// min over a cell-centred grid of A3 of chi_A1 * chi_A2
double conv_lower_bound(const SpaceTimeSet& A1, const SpaceTimeSet& A2, const SpaceTimeSet& A3, int samples = 9,
                        int panels = 64);

// 2D discrete convolution of two unsheared fields with equal steps (FFT based)
SpaceTimeField discrete_convolve(const SpaceTimeField& a, const SpaceTimeField& b);

// Largest dilation factor of B (about the centres of its xi interval and eta interval)
// needed for (tau - tau1, xi - xi1) in B over sampled (tau, xi) in A3, (tau1, xi1) in A1.
// Values <= 1 mean the shifted-membership claim holds exactly on the samples.
double membership_dilation(const SpaceTimeSet& A3, const SpaceTimeSet& A1, const SpaceTimeSet& B, int samples = 9);

struct CertifyRecord {
    std::string regime;
    double alpha = 0.0;
    double s = 0.0;
    double b = 0.0;
    double N = 0.0;
    double xsb_u = 0.0;
    double xsb_v = 0.0;
    double conv_min = 0.0;
    double ratio = 0.0;
    double slope = 0.0;
};

struct CertifyResolution {
    int nxi = 96;
    int neta = 96;
    int panels = 64;
    int set_samples = 32;
};

// R(N) = ||<xi>^s <tau - xi^2>^{b-1} chi_A1 * chi_A2|| / (||u||_{X^{s,b}} ||v||_{X_alpha^{s,b}})
// for each N and the least-squares slope of log R against log N.
std::vector<CertifyRecord> ratio_sweep(const Regime& r, double s, double b, const std::vector<double>& Ns,
                                       const CertifyResolution& res = {});

// a_m sum a_j / sum a_j^2 with a_j = 1/(1+j) for j < m and a_m = 1
double endpoint_check(int m);
// endpoint_check(m) for m = 1..m_max in one pass
std::vector<double> endpoint_ratios(int m_max);

}  // namespace qnls
