#include "qnls/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>

#include "qnls/error.hpp"

namespace qnls {

namespace {

void check_hyperplane(std::initializer_list<double> xs, const char* op)
{
    double sum = 0.0, top = 0.0;
    for (double x : xs) {
        sum += x;
        top = std::max(top, std::abs(x));
    }
    if (std::abs(sum) > 1e-9 * top)
        throw ContractError(std::string(op) + ": frequencies do not sum to zero (sum = " + std::to_string(sum) + ")");
}

}  // namespace

double h3(double xi1, double xi2, double xi3, double alpha)
{
    check_hyperplane({xi1, xi2, xi3}, "h3");
    return xi1 * xi1 - alpha * xi2 * xi2 + xi3 * xi3;
}

double H3Factorization::evaluate(double xi1, double xi3) const
{
    switch (kind) {
    case H3Kind::SumOfSquares: {
        const double d = xi1 - c2 * xi3;
        return c1 * d * d + c3 * xi3 * xi3;
    }
    case H3Kind::DoubleRoot: {
        const double d = xi1 - r_plus * xi3;
        return lead * d * d;
    }
    case H3Kind::RealRoots:
        return lead * (xi1 - r_plus * xi3) * (xi1 - r_minus * xi3);
    }
    return 0.0;
}

H3Factorization h3_factor(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw ContractError("h3_factor: alpha must lie in (0, 1)");
    H3Factorization f;
    f.alpha = alpha;
    f.lead = 1.0 - alpha;
    if (alpha < 0.5) {
        f.kind = H3Kind::SumOfSquares;
        f.c1 = 1.0 - alpha;
        f.c2 = alpha / (1.0 - alpha);
        f.c3 = (1.0 - 2.0 * alpha) / (1.0 - alpha);
    } else if (alpha == 0.5) {
        f.kind = H3Kind::DoubleRoot;
        f.r_plus = f.r_minus = 1.0;
    } else {
        f.kind = H3Kind::RealRoots;
        const double s = std::sqrt(2.0 * alpha - 1.0);
        f.r_plus = (alpha + s) / (1.0 - alpha);
        f.r_minus = (alpha - s) / (1.0 - alpha);
    }
    return f;
}

H4Result h4_and_g(double xi1, double xi2, double xi3, double xi4, double alpha)
{
    check_hyperplane({xi1, xi2, xi3, xi4}, "h4_and_g");
    H4Result r;
    const double xi12 = xi1 + xi2, xi23 = xi2 + xi3, xi14 = xi1 + xi4, xi34 = xi3 + xi4;
    r.g = 2.0 * alpha * xi23 + (1.0 - alpha) * (xi2 - xi1);
    r.h4 = -xi12 * r.g;
    r.h4_direct = xi1 * xi1 - xi2 * xi2 + alpha * xi3 * xi3 - alpha * xi4 * xi4;
    r.g_from_xi14 = -2.0 * alpha * xi14 - 2.0 * (1.0 - alpha) * xi1 - (1.0 - alpha) * xi34;
    r.g_from_xi4 = -2.0 * alpha * xi4 - (1.0 - alpha) * xi34 - 2.0 * xi1;
    r.g_reordered = -2.0 * xi1 - 2.0 * alpha * xi4 - (1.0 - alpha) * xi34;
    return r;
}

TauIdentity tau_identity(double xi1, double xi2, double xi3, double xi4)
{
    check_hyperplane({xi1, xi2, xi3, xi4}, "tau_identity");
    TauIdentity t;
    t.alternating_sum = -xi1 * xi1 + xi2 * xi2 - xi3 * xi3 + xi4 * xi4;
    t.factored = -2.0 * (xi1 + xi2) * (xi1 + xi4);
    return t;
}

OmegaClass omega_membership(double xi1, double xi2, double xi3, double xi4, double theta)
{
    check_hyperplane({xi1, xi2, xi3, xi4}, "omega_membership");
    if (!(theta > 0.0 && theta < 1.0)) throw ContractError("omega_membership: theta must lie in (0, 1)");
    OmegaClass c;
    c.Nm = std::max({std::abs(xi1), std::abs(xi2), std::abs(xi3), std::abs(xi4)});
    const double a12 = std::abs(xi1 + xi2), a14 = std::abs(xi1 + xi4);
    const double cut = theta * c.Nm;
    const bool small12 = a12 < cut, small14 = a14 < cut;
    if (!small12 && !small14) {
        c.label = OmegaLabel::Omega;
        return c;
    }
    if (small12 && small14) {
        c.label = OmegaLabel::Case1;
        return c;
    }
    c.small_is_xi14 = small14;
    const double w = small12 ? a12 : a14;
    if (w <= theta / c.Nm) c.label = OmegaLabel::Case2_1;
    else if (w >= theta) c.label = OmegaLabel::Case2_2;
    else c.label = OmegaLabel::Case2_3;
    return c;
}

std::string to_string(OmegaLabel l)
{
    switch (l) {
    case OmegaLabel::Omega: return "omega";
    case OmegaLabel::Case1: return "case1";
    case OmegaLabel::Case2_1: return "case2.1";
    case OmegaLabel::Case2_2: return "case2.2";
    case OmegaLabel::Case2_3: return "case2.3";
    }
    return "?";
}

std::string to_string(H3Kind k)
{
    switch (k) {
    case H3Kind::SumOfSquares: return "sum-of-squares";
    case H3Kind::DoubleRoot: return "double-root";
    case H3Kind::RealRoots: return "real-roots";
    }
    return "?";
}

}  // namespace qnls
