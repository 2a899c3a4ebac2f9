#include "qnls/imethod.hpp"

#include <cmath>
#include <string>

#include "qnls/error.hpp"
#include "qnls/fit.hpp"
#include "qnls/parallel.hpp"

namespace qnls {

namespace {

void require_nonresonant(double alpha, const char* op)
{
    if (!(alpha < 0.5))
        throw RegimeError(std::string(op) + ": defined only for alpha < 1/2 (resonant denominators), got alpha = " +
                          std::to_string(alpha));
}

cplx guarded_ratio(double num, double den, const char* op)
{
    if (num == 0.0) return {};
    if (den == 0.0) throw RegimeError(std::string(op) + ": vanishing denominator with nonzero numerator");
    return num / den;
}

}  // namespace

IMultiplier make_imultiplier(double N, double rho)
{
    require(N >= 1.0 && std::isfinite(N), "IMultiplier: N must be >= 1");
    require(rho > 0.0 && std::isfinite(rho), "IMultiplier: rho must be positive");
    return {N, rho};
}

double m_eval(const IMultiplier& I, double xi)
{
    const double a = std::abs(xi);
    if (a <= I.N) return 1.0;
    if (a >= 2.0 * I.N) return std::pow(I.N / a, I.rho);
    const double t = std::log2(a / I.N);
    const double r = t * t * (6.0 - 8.0 * t + 3.0 * t * t);
    return std::exp(-I.rho * r * std::log(a / I.N));
}

double m_log_slope(const IMultiplier& I, double xi)
{
    const double a = std::abs(xi);
    if (a <= I.N) return 0.0;
    if (a >= 2.0 * I.N) return -I.rho;
    const double t = std::log2(a / I.N);
    // d/dy of r(t) * y with y = t log 2
    return -I.rho * t * t * (18.0 - 32.0 * t + 15.0 * t * t);
}

FieldPair apply_I(const FieldPair& s, const IMultiplier& I)
{
    FieldPair out = s;
    const auto& g = s.grid();
    for (int k = g.kmin(); k <= g.kmax(); ++k) {
        const double m = m_eval(I, g.xi(k));
        out.u.at(k) *= m;
        out.v.at(k) *= m;
    }
    return out;
}

double modified_mass_e2(const FieldPair& s, const IMultiplier& I) { return mass(apply_I(s, I)); }

cplx sigma3_eval(const IMultiplier& I, double alpha, double xi1, double xi2, double xi3)
{
    require_nonresonant(alpha, "sigma3");
    const double m1 = m_eval(I, xi1), m2 = m_eval(I, xi2);
    const double num = m1 * m1 - m2 * m2;
    if (num == 0.0) return {};
    const double h3 = xi1 * xi1 - alpha * xi2 * xi2 + xi3 * xi3;
    if (h3 == 0.0) throw RegimeError("sigma3: vanishing resonance function with nonzero numerator");
    // num / (-i h3) = i num / h3
    return {0.0, num / h3};
}

Multiplier sigma3_multiplier(const IMultiplier& I, double alpha)
{
    require_nonresonant(alpha, "sigma3");
    Multiplier m;
    m.arity = 3;
    m.eval = [I, alpha](const double* xi) { return sigma3_eval(I, alpha, xi[0], xi[1], xi[2]); };
    return m;
}

double modified_mass_e3(const FieldPair& s, const IMultiplier& I)
{
    const auto sig = sigma3_multiplier(I, s.alpha);
    return modified_mass_e2(s, I) + lambda_k(sig, {s.u, s.v, s.u}, {false, true, false}).imag();
}

R4Multipliers r4_multipliers(const IMultiplier& I, double alpha)
{
    require_nonresonant(alpha, "r4_multipliers");
    auto m2 = [I](double x) {
        const double m = m_eval(I, x);
        return m * m;
    };
    // (m(a)^2 + m(b)^2 - 2 m(c)^2) / (a^2 - alpha c^2 + b^2) at (a, b, c) = (xi1, xi23, xi4)
    auto prime = [m2, alpha](double a, double b, double c) {
        return guarded_ratio(m2(a) + m2(b) - 2.0 * m2(c), a * a - alpha * c * c + b * b, "R4'");
    };
    // (m(a)^2 - m(b)^2) / (a^2 - alpha b^2 + c^2) at (a, b, c) = (xi1, xi24, xi3)
    auto dprime = [m2, alpha](double a, double b, double c) {
        return guarded_ratio(m2(a) - m2(b), a * a - alpha * b * b + c * c, "R4''");
    };

    R4Multipliers r;
    r.prime.arity = 4;
    r.prime.eval = [prime](const double* xi) { return prime(xi[0], xi[1] + xi[2], xi[3]); };
    r.prime.grid_sums = {0b0110u};
    r.double_prime.arity = 4;
    r.double_prime.eval = [dprime](const double* xi) { return dprime(xi[0], xi[1] + xi[3], xi[2]); };
    r.double_prime.grid_sums = {0b1010u};
    r.prime_collapsed.arity = 3;
    r.prime_collapsed.eval = [prime](const double* y) { return prime(y[0], y[1], y[2]); };
    r.double_prime_collapsed.arity = 3;
    r.double_prime_collapsed.eval = [dprime](const double* y) { return dprime(y[0], y[1], y[2]); };
    return r;
}

double e2_derivative(const FieldPair& s, const IMultiplier& I)
{
    Multiplier m;
    m.arity = 3;
    m.eval = [I](const double* xi) {
        const double m1 = m_eval(I, xi[0]), m2 = m_eval(I, xi[1]);
        return cplx(m2 * m2 - m1 * m1);
    };
    return lambda_k(m, {s.u, s.v, s.u}, {false, true, false}).imag();
}

double e3_derivative(const FieldPair& s, const IMultiplier& I, bool fast)
{
    const auto r = r4_multipliers(I, s.alpha);
    cplx rp, rpp;
    if (fast) {
        rp = lambda4_paired(r.prime_collapsed, {s.u, s.u, s.v, s.v}, {false, true, false, true}, 2, 3);
        rpp = lambda4_paired(r.double_prime_collapsed, {s.u, s.u, s.u, s.u}, {false, true, false, true}, 2, 4);
    } else {
        rp = lambda_k(r.prime, {s.u, s.u, s.v, s.v}, {false, true, false, true});
        rpp = lambda_k(r.double_prime, {s.u, s.u, s.u, s.u}, {false, true, false, true});
    }
    return rp.imag() - 0.5 * rpp.imag();
}

std::vector<ResidualSample> derivative_residuals(const Trajectory& traj, const IMultiplier& I, Functional which,
                                                 bool fast)
{
    const auto& S = traj.samples;
    if (S.size() < 3)
        throw ContractError("derivative_residuals: need at least 3 samples, got " + std::to_string(S.size()));
    if (which == Functional::E3) require_nonresonant(S.front().alpha, "derivative_residuals(E3)");
    std::vector<double> q(S.size());
    parallel_for(S.size(), [&](std::size_t i) {
        q[i] = which == Functional::E2 ? modified_mass_e2(S[i], I) : modified_mass_e3(S[i], I);
    });
    std::vector<ResidualSample> out(S.size() - 2);
    parallel_for(out.size(), [&](std::size_t j) {
        const std::size_t i = j + 1;
        ResidualSample r;
        r.t = S[i].t;
        r.finite_difference = (q[i + 1] - q[i - 1]) / (S[i + 1].t - S[i - 1].t);
        r.identity = which == Functional::E2 ? e2_derivative(S[i], I) : e3_derivative(S[i], I, fast);
        r.residual = std::abs(r.finite_difference - r.identity);
        out[j] = r;
    });
    return out;
}

SweepResult almost_conservation_sweep(const SweepConfig& cfg)
{
    require_nonresonant(cfg.alpha, "almost_conservation_sweep");
    require(cfg.N_list.size() >= 3, "almost_conservation_sweep: need at least 3 N values for the fits");
    require(cfg.delta > 0.0, "almost_conservation_sweep: delta must be positive");
    const FourierGrid g = make_grid(cfg.L, cfg.n);
    const FieldPair init = random_state(g, cfg.alpha, cfg.data);

    EvolveOptions opt;
    opt.T = cfg.delta;
    opt.dt = cfg.dt;
    opt.nonlinear = cfg.nonlinear;
    opt.keep_samples = false;
    const Trajectory traj = strang_evolve(init, opt);
    const FieldPair& a = traj.samples.front();
    const FieldPair& b = traj.samples.back();

    SweepResult res;
    res.records.resize(cfg.N_list.size());
    std::vector<double> normalized(cfg.N_list.size());
    parallel_for(cfg.N_list.size(), [&](std::size_t i) {
        const IMultiplier I = make_imultiplier(cfg.N_list[i], cfg.rho);
        const double e2a = modified_mass_e2(a, I), e2b = modified_mass_e2(b, I);
        const double e3a = modified_mass_e3(a, I), e3b = modified_mass_e3(b, I);
        SweepRecord r;
        r.N = cfg.N_list[i];
        r.rho = cfg.rho;
        r.alpha = cfg.alpha;
        r.dt = cfg.dt;
        r.n = cfg.n;
        r.L = cfg.L;
        r.e2_increment = std::abs(e2b - e2a);
        r.e3_increment = std::abs(e3b - e3a);
        r.e3_minus_e2 = e3a - e2a;
        const FieldPair Ia = apply_I(a, I);
        const double nu = l2_norm(Ia.u), nv = l2_norm(Ia.v);
        normalized[i] = std::abs(r.e3_minus_e2) / (nu * nu * nv);
        res.records[i] = r;
    });

    std::vector<double> Ns, inc;
    for (const auto& r : res.records) {
        Ns.push_back(r.N);
        inc.push_back(r.e3_increment);
    }
    const LinearFit fg = fit_loglog(Ns, normalized);
    const LinearFit fb = fit_loglog(Ns, inc);
    res.gamma = -fg.slope;
    res.gamma_r2 = fg.r2;
    res.beta = -fb.slope;
    res.beta_r2 = fb.r2;
    for (auto& r : res.records) {
        r.fitted_gamma = res.gamma;
        r.fitted_beta = res.beta;
    }
    return res;
}

}  // namespace qnls
