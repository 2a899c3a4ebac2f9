#pragma once

#include <string>

namespace qnls {

// beta = min(2, 3 - 2 rho), rho in (0, 5/8)
double beta(double rho);

struct ScalePlan {
    double lambda = 0.0;
    double lambda_exponent = 0.0;  // 2 rho / (3 - 2 rho) + eps
    double bound_exponent = 0.0;   // 2 rho - (3 - 2 rho) lambda_exponent = -eps (3 - 2 rho)
    double bound = 0.0;            // N^{2 rho} / lambda^{3 - 2 rho} * norm0^2
};

ScalePlan scale_plan(double rho, double N, double eps, double norm0);

struct Margins {
    double eps = 0.01;          // lambda = N^{2 rho/(3 - 2 rho) + eps}
    double eps_prime = 0.01;    // loss in the decay exponent
    double eps_second = 0.01;   // loss in the growth exponent (window scheme)
    double margin = 100.0;      // stands for "much less than"
    double delta = 1.0;         // local window length
};

enum class PlanRegime { SmallAlpha, MidAlpha };

struct GwpPlan {
    PlanRegime regime = PlanRegime::SmallAlpha;
    double rho = 0.0;
    double T0 = 0.0;
    Margins margins{};
    int log2_N = 0;
    double N = 0.0;
    double lambda = 0.0;
    double beta = 0.0;        // small alpha: decay exponent; mid alpha: 7/15
    double theta = 0.0;       // mid alpha only
    double window = 0.0;      // delta or mu = N^theta
    double iterations = 0.0;  // ceil(lambda^2 T0 / window)
    double slack = 0.0;       // exponent left over in the defining inequality
    double budget = 0.0;      // accumulated increment per unit constant
    double budget_limit = 0.0;
};

// smallest dyadic N with N^{beta - eps'} >= margin * lambda(N)^2 * T0
GwpPlan choose_N_small_alpha(double rho, double T0, const Margins& m = {});

// smallest dyadic N with N^{7/15 - eps'} >= margin * T0 * N^{4 rho/(3 - 2 rho) + eps''}, rho < 1/4
GwpPlan choose_N_mid_alpha(double rho, double T0, double theta, const Margins& m = {});

// Exponents (in powers of N, with mu = N^theta) of the terms the window scheme compares:
// max{mu^3/N, mu^{k-1/2}/N^{k/2}, mu^{k+1/2}/N^{(k+1)/2} : k = 1,2,3} against mu^{1/2}/N^{1/3}.
struct WindowBudget {
    double lhs_exponent = 0.0;    // theta/2 - 1/3
    double max_exponent = 0.0;    // largest competing exponent
    std::string binding_term;     // which term attains it
    double slack = 0.0;           // lhs_exponent - max_exponent
};

WindowBudget window_budget(double theta);

std::string to_string(PlanRegime r);

}  // namespace qnls
