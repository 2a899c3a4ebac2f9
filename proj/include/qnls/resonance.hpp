#pragma once

#include <string>

namespace qnls {

// h3 = xi1^2 - alpha xi2^2 + xi3^2 on xi1 + xi2 + xi3 = 0
double h3(double xi1, double xi2, double xi3, double alpha);

enum class H3Kind { SumOfSquares, DoubleRoot, RealRoots };

// Regime-dependent form of h3 written in (xi1, xi3):
//   alpha < 1/2:  c1 (xi1 - c2 xi3)^2 + c3 xi3^2 with (c1, c2, c3) = (1-alpha, alpha/(1-alpha), (1-2alpha)/(1-alpha))
//   alpha > 1/2:  lead (xi1 - r_plus xi3)(xi1 - r_minus xi3), lead = 1 - alpha
//   alpha = 1/2:  lead (xi1 - xi3)^2, reported as DoubleRoot
struct H3Factorization {
    H3Kind kind = H3Kind::SumOfSquares;
    double alpha = 0.0;
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
    double lead = 0.0, r_plus = 0.0, r_minus = 0.0;

    double evaluate(double xi1, double xi3) const;
};

H3Factorization h3_factor(double alpha);

// h4 for the (u, ubar, v, vbar) pattern: xi1^2 - xi2^2 + alpha xi3^2 - alpha xi4^2 = -xi12 * g,
// g = 2 alpha xi23 + (1 - alpha)(xi2 - xi1). The three g_* values are the forms obtained
// by eliminating xi2 with the hyperplane constraint.
struct H4Result {
    double h4 = 0.0;
    double g = 0.0;
    double h4_direct = 0.0;
    double g_from_xi14 = 0.0;  // -2 alpha xi14 - 2(1 - alpha) xi1 - (1 - alpha) xi34
    double g_from_xi4 = 0.0;   // -2 alpha xi4 - (1 - alpha) xi34 - 2 xi1
    double g_reordered = 0.0;  // -2 xi1 - 2 alpha xi4 - (1 - alpha) xi34
};

H4Result h4_and_g(double xi1, double xi2, double xi3, double xi4, double alpha);

// sum_j (-1)^j xi_j^2 on xi1 + ... + xi4 = 0, and the factored value -2 xi12 xi14 (= 2 xi12 xi23)
struct TauIdentity {
    double alternating_sum = 0.0;
    double factored = 0.0;
};

TauIdentity tau_identity(double xi1, double xi2, double xi3, double xi4);

enum class OmegaLabel { Omega, Case1, Case2_1, Case2_2, Case2_3 };

// Omega(theta): |xi12| >= theta Nm and |xi14| >= theta Nm, Nm = max |xi_j|.
// Case1: both below theta Nm. Otherwise exactly one of them (the "small" one, w) is below
// theta Nm and w decides: Case2_1 if w <= theta/Nm, else Case2_2 if w >= theta, else Case2_3.
struct OmegaClass {
    OmegaLabel label = OmegaLabel::Omega;
    double Nm = 0.0;
    bool small_is_xi14 = false;
};

OmegaClass omega_membership(double xi1, double xi2, double xi3, double xi4, double theta);

std::string to_string(OmegaLabel l);
std::string to_string(H3Kind k);

}  // namespace qnls
