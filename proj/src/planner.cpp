#include "qnls/planner.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qnls/error.hpp"

namespace qnls {

namespace {

constexpr double rho_max_small = 5.0 / 8.0;
constexpr double rho_max_mid = 0.25;
constexpr double window_theta_max = 2.0 / 15.0;
constexpr double mid_decay = 7.0 / 15.0;

void check_margins(const Margins& m)
{
    require(m.eps >= 0.0 && m.eps_prime >= 0.0 && m.eps_second >= 0.0, "plan: epsilons must be non-negative");
    require(m.margin > 0.0, "plan: margin must be positive");
    require(m.delta > 0.0, "plan: delta must be positive");
}

// smallest k >= 0 with k * slope >= target (slope > 0)
int smallest_exponent(double slope, double target)
{
    if (target <= 0.0) return 0;
    const double guess = std::ceil(target / slope);
    require(guess < 1e9, "plan: required N exceeds 2^1e9");
    int k = static_cast<int>(guess);
    while (k > 0 && (k - 1) * slope >= target) --k;
    while (k * slope < target) ++k;
    return k;
}

}  // namespace

double beta(double rho)
{
    if (!(rho > 0.0 && rho < rho_max_small))
        throw RegimeError("beta: rho must lie in (0, 5/8), got " + std::to_string(rho));
    return std::min(2.0, 3.0 - 2.0 * rho);
}

ScalePlan scale_plan(double rho, double N, double eps, double norm0)
{
    beta(rho);
    require(eps >= 0.0, "scale_plan: eps must be non-negative");
    require(N >= 1.0, "scale_plan: N must be >= 1");
    ScalePlan p;
    p.lambda_exponent = 2.0 * rho / (3.0 - 2.0 * rho) + eps;
    p.lambda = std::pow(N, p.lambda_exponent);
    p.bound_exponent = 2.0 * rho - (3.0 - 2.0 * rho) * p.lambda_exponent;
    p.bound = std::pow(N, 2.0 * rho) / std::pow(p.lambda, 3.0 - 2.0 * rho) * norm0 * norm0;
    return p;
}

GwpPlan choose_N_small_alpha(double rho, double T0, const Margins& m)
{
    const double b = beta(rho);
    require(T0 > 0.0, "choose_N_small_alpha: T0 must be positive");
    check_margins(m);
    GwpPlan p;
    p.regime = PlanRegime::SmallAlpha;
    p.rho = rho;
    p.T0 = T0;
    p.margins = m;
    p.beta = b;
    const double lam_exp = 2.0 * rho / (3.0 - 2.0 * rho) + m.eps;
    p.slack = b - m.eps_prime - 2.0 * lam_exp;
    if (!(p.slack > 0.0))
        throw RegimeError("choose_N_small_alpha: no feasible N, slack exponent " + std::to_string(p.slack));
    p.log2_N = smallest_exponent(p.slack, std::log2(m.margin * T0));
    const double k = p.log2_N;
    p.N = std::exp2(k);
    p.lambda = std::exp2(k * lam_exp);
    p.window = m.delta;
    p.iterations = std::ceil(p.lambda * p.lambda * T0 / m.delta);
    p.budget = p.iterations * std::exp2(-k * (b - m.eps_prime));
    p.budget_limit = 1.0 / (m.delta * m.margin) + std::exp2(-k * (b - m.eps_prime));
    return p;
}

GwpPlan choose_N_mid_alpha(double rho, double T0, double theta, const Margins& m)
{
    require(rho >= 0.0, "choose_N_mid_alpha: rho must be non-negative");
    if (!(rho < rho_max_mid))
        throw RegimeError("choose_N_mid_alpha: requires rho < 1/4, got " + std::to_string(rho));
    require(theta > 0.0 && theta < window_theta_max, "choose_N_mid_alpha: theta must lie in (0, 2/15)");
    require(T0 > 0.0, "choose_N_mid_alpha: T0 must be positive");
    check_margins(m);
    GwpPlan p;
    p.regime = PlanRegime::MidAlpha;
    p.rho = rho;
    p.T0 = T0;
    p.margins = m;
    p.beta = mid_decay;
    p.theta = theta;
    const double growth = 4.0 * rho / (3.0 - 2.0 * rho);
    p.slack = mid_decay - m.eps_prime - growth - m.eps_second;
    if (!(p.slack > 0.0))
        throw RegimeError("choose_N_mid_alpha: no feasible N, slack exponent " + std::to_string(p.slack));
    p.log2_N = smallest_exponent(p.slack, std::log2(m.margin * T0));
    const double k = p.log2_N;
    const double lam_exp = 2.0 * rho / (3.0 - 2.0 * rho) + m.eps;
    p.N = std::exp2(k);
    p.lambda = std::exp2(k * lam_exp);
    p.window = std::exp2(k * theta);
    p.iterations = std::ceil(p.lambda * p.lambda * T0 / p.window);
    // m windows of size N^{-(1/3 - eps')} each
    p.budget = p.iterations * std::exp2(-k * (1.0 / 3.0 - m.eps_prime));
    // what the defining inequality guarantees: the factor N^{2/15 - theta} is not absorbed
    p.budget_limit = std::exp2(k * (window_theta_max - theta + 2.0 * m.eps - m.eps_second)) / m.margin +
                     std::exp2(-k * (1.0 / 3.0 - m.eps_prime));
    return p;
}

WindowBudget window_budget(double theta)
{
    require(theta > 0.0, "window_budget: theta must be positive");
    std::vector<std::pair<std::string, double>> terms;
    terms.emplace_back("mu^3/N", 3.0 * theta - 1.0);
    for (int k = 1; k <= 3; ++k) {
        const std::string tag = ", k=" + std::to_string(k);
        terms.emplace_back("mu^(k-1/2)/N^(k/2)" + tag, (k - 0.5) * theta - 0.5 * k);
        terms.emplace_back("mu^(k+1/2)/N^((k+1)/2)" + tag, (k + 0.5) * theta - 0.5 * (k + 1));
    }
    WindowBudget w;
    w.lhs_exponent = 0.5 * theta - 1.0 / 3.0;
    w.max_exponent = terms.front().second;
    w.binding_term = terms.front().first;
    for (const auto& [name, e] : terms) {
        if (e > w.max_exponent) {
            w.max_exponent = e;
            w.binding_term = name;
        }
    }
    w.slack = w.lhs_exponent - w.max_exponent;
    return w;
}

std::string to_string(PlanRegime r) { return r == PlanRegime::SmallAlpha ? "small-alpha" : "mid-alpha"; }

}  // namespace qnls
