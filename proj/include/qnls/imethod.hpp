#pragma once

#include <string>
#include <vector>

#include "qnls/evolution.hpp"
#include "qnls/functionals.hpp"

namespace qnls {

// m(xi) = 1 for |xi| <= N, (N/|xi|)^rho for |xi| >= 2N. In between
// m = exp(rho * r(t) * log(N/|xi|)) with t = log2(|xi|/N) and r(t) = 6t^2 - 8t^3 + 3t^4,
// which makes log m a C^2 function of log|xi| with monotone blend.
struct IMultiplier {
    double N = 1.0;
    double rho = 0.5;
};

IMultiplier make_imultiplier(double N, double rho);
double m_eval(const IMultiplier& I, double xi);
// d log m / d log|xi|, zero inside |xi| <= N
double m_log_slope(const IMultiplier& I, double xi);

FieldPair apply_I(const FieldPair& s, const IMultiplier& I);

// 1/2 ||Iu||^2 + ||Iv||^2
double modified_mass_e2(const FieldPair& s, const IMultiplier& I);

// (m1^2 - m2^2) / (-i h3), h3 = xi1^2 - alpha xi2^2 + xi3^2; 0 where the numerator vanishes
cplx sigma3_eval(const IMultiplier& I, double alpha, double xi1, double xi2, double xi3);
Multiplier sigma3_multiplier(const IMultiplier& I, double alpha);

// E2 + Im Lambda_3(sigma3; u, vbar, u)
double modified_mass_e3(const FieldPair& s, const IMultiplier& I);

// R4' multiplier (m1^2 + m23^2 - 2 m4^2) / (xi1^2 - alpha xi4^2 + xi23^2), pattern (u, ubar, v, vbar);
// R4'' multiplier (m1^2 - m24^2) / (xi1^2 - alpha xi24^2 + xi3^2), pattern (u, ubar, u, ubar).
// Both carry the pair constraint that the combined frequency is a band mode.
struct R4Multipliers {
    Multiplier prime;
    Multiplier double_prime;
    // the same multipliers as functions of (xi_p, pair sum, xi_q), for lambda4_paired
    Multiplier prime_collapsed;         // pair (2,3), arguments (xi1, xi23, xi4)
    Multiplier double_prime_collapsed;  // pair (2,4), arguments (xi1, xi24, xi3)
};

R4Multipliers r4_multipliers(const IMultiplier& I, double alpha);

// Im R4' - 1/2 Im R4''; fast uses the paired Lambda_4 evaluation
double e3_derivative(const FieldPair& s, const IMultiplier& I, bool fast = true);
// Im Lambda_3(m2^2 - m1^2; u, vbar, u)
double e2_derivative(const FieldPair& s, const IMultiplier& I);

enum class Functional { E2, E3 };

struct ResidualSample {
    double t = 0.0;
    double finite_difference = 0.0;
    double identity = 0.0;
    double residual = 0.0;
};

// central difference of E2 or E3 at every interior sample against the multiplier form
std::vector<ResidualSample> derivative_residuals(const Trajectory& traj, const IMultiplier& I, Functional which,
                                                 bool fast = true);

struct SweepConfig {
    double L = 6.283185307179586;
    int n = 512;
    double alpha = 0.25;
    double rho = 0.5;
    std::vector<double> N_list{8, 16, 32, 64};
    double dt = 2.5e-6;
    double delta = 0.02;
    bool nonlinear = true;
    DataSpec data{};
};

struct SweepRecord {
    double N = 0.0;
    double rho = 0.0;
    double alpha = 0.0;
    double dt = 0.0;
    int n = 0;
    double L = 0.0;
    double e2_increment = 0.0;
    double e3_increment = 0.0;
    double e3_minus_e2 = 0.0;
    double fitted_gamma = 0.0;
    double fitted_beta = 0.0;
};

struct SweepResult {
    std::vector<SweepRecord> records;
    double gamma = 0.0;  // decay of |E3 - E2| / (||Iu||^2 ||Iv||) at t = 0
    double gamma_r2 = 0.0;
    double beta = 0.0;  // decay of |E3(delta) - E3(0)|
    double beta_r2 = 0.0;
};

// Evolves the data once over [0, delta] and measures E2, E3 at both ends for every N.
SweepResult almost_conservation_sweep(const SweepConfig& cfg);

}  // namespace qnls
