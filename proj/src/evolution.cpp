#include "qnls/evolution.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "qnls/error.hpp"
#include "qnls/rng.hpp"

namespace qnls {

namespace {

void check_alpha(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ContractError("alpha must lie in (0, 1), got " + std::to_string(alpha));
}

void axpy(SpectralField& y, cplx a, const SpectralField& x)
{
    for (std::size_t i = 0; i < y.coeffs.size(); ++i) y.coeffs[i] += a * x.coeffs[i];
}

bool finite(const SpectralField& f)
{
    for (const auto& z : f.coeffs)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

const FieldPair* find_sample(const Trajectory& traj, double t)
{
    const double tol = 1e-9 * std::max(1.0, std::abs(t)) + 1e-6 * traj.dt;
    for (const auto& s : traj.samples)
        if (std::abs(s.t - t) <= tol) return &s;
    return nullptr;
}

}  // namespace

FieldPair make_state(SpectralField u, SpectralField v, double alpha, double t)
{
    check_alpha(alpha);
    if (!(u.grid == v.grid)) throw ContractError("make_state: u and v must share one grid");
    FieldPair s;
    s.u = std::move(u);
    s.v = std::move(v);
    s.alpha = alpha;
    s.t = t;
    return s;
}

FieldPair zero_state(const FourierGrid& g, double alpha)
{
    return make_state(SpectralField(g), SpectralField(g), alpha);
}

FieldPair random_state(const FourierGrid& g, double alpha, const DataSpec& spec)
{
    const int band = spec.band < 0 ? g.n / 8 : spec.band;
    require(band < g.n / 2, "random_state: band must stay below n/2");
    Rng rng(spec.seed);
    auto draw = [&](double target) {
        SpectralField f(g);
        for (int k = -band; k <= band; ++k) {
            const double re = rng.normal();
            const double im = rng.normal();
            const double xi = g.xi(k);
            const double w = std::pow(1.0 + xi * xi, -0.5 * spec.envelope);
            f.at(k) = w * cplx(re, im);
        }
        const double nrm = weighted_norm(f, spec.s, false);
        if (nrm > 0.0) f = cplx(target / nrm) * f;
        return f;
    };
    SpectralField u = draw(spec.norm_u);
    SpectralField v = draw(spec.norm_v);
    return make_state(std::move(u), std::move(v), alpha);
}

FieldPair linear_flow(const FieldPair& s, double t)
{
    FieldPair out = s;
    const auto& g = s.grid();
    for (int k = g.kmin(); k <= g.kmax(); ++k) {
        const double xi2 = g.xi(k) * g.xi(k);
        out.u.at(k) *= std::polar(1.0, -t * xi2);
        out.v.at(k) *= std::polar(1.0, -s.alpha * t * xi2);
    }
    return out;
}

std::pair<SpectralField, SpectralField> nonlinear_rhs(const SpectralField& u, const SpectralField& v)
{
    SpectralField du = convolve(v, conjugate(u));
    SpectralField dv = convolve(u, u);
    zero_nyquist(du);
    zero_nyquist(dv);
    for (auto& z : du.coeffs) z *= cplx(0.0, -1.0);
    for (auto& z : dv.coeffs) z *= cplx(0.0, -0.5);
    return {std::move(du), std::move(dv)};
}

FieldPair nonlinear_substep(const FieldPair& s, double dt)
{
    require(dt > 0.0, "nonlinear_substep: dt must be positive");
    auto [k1u, k1v] = nonlinear_rhs(s.u, s.v);
    SpectralField u2 = s.u, v2 = s.v;
    axpy(u2, 0.5 * dt, k1u);
    axpy(v2, 0.5 * dt, k1v);
    auto [k2u, k2v] = nonlinear_rhs(u2, v2);
    SpectralField u3 = s.u, v3 = s.v;
    axpy(u3, 0.5 * dt, k2u);
    axpy(v3, 0.5 * dt, k2v);
    auto [k3u, k3v] = nonlinear_rhs(u3, v3);
    SpectralField u4 = s.u, v4 = s.v;
    axpy(u4, dt, k3u);
    axpy(v4, dt, k3v);
    auto [k4u, k4v] = nonlinear_rhs(u4, v4);

    FieldPair out = s;
    for (std::size_t i = 0; i < out.u.coeffs.size(); ++i) {
        out.u.coeffs[i] += dt / 6.0 * (k1u.coeffs[i] + 2.0 * k2u.coeffs[i] + 2.0 * k3u.coeffs[i] + k4u.coeffs[i]);
        out.v.coeffs[i] += dt / 6.0 * (k1v.coeffs[i] + 2.0 * k2v.coeffs[i] + 2.0 * k3v.coeffs[i] + k4v.coeffs[i]);
    }
    return out;
}

Trajectory strang_evolve(const FieldPair& init, const EvolveOptions& opt)
{
    require(opt.dt > 0.0, "strang_evolve: dt must be positive");
    require(opt.T >= 0.0, "strang_evolve: T must be non-negative");
    require(opt.stride >= 1, "strang_evolve: stride must be >= 1");
    check_alpha(init.alpha);

    Trajectory traj;
    traj.dt = opt.dt;
    traj.stride = opt.stride;

    FieldPair s = init;
    zero_nyquist(s.u);
    zero_nyquist(s.v);
    const double t0 = s.t;
    const double norm0 = l2_norm(s.u);
    const long long steps = std::llround(opt.T / opt.dt);

    auto emit = [&](const FieldPair& st) {
        if (opt.on_sample) opt.on_sample(st);
        if (opt.keep_samples || traj.samples.empty()) traj.samples.push_back(st);
    };
    emit(s);

    const double h = 0.5 * opt.dt;
    for (long long step = 1; step <= steps; ++step) {
        s = linear_flow(s, h);
        if (opt.nonlinear) s = nonlinear_substep(s, opt.dt);
        s = linear_flow(s, h);
        s.t = t0 + static_cast<double>(step) * opt.dt;

        if (!finite(s.u) || !finite(s.v)) {
            std::ostringstream msg;
            msg << "strang_evolve: non-finite state at t = " << s.t << " (possible blow-up or instability; reduce dt)";
            throw BlowUpError(msg.str());
        }
        if (norm0 > 0.0) {
            const double nu = l2_norm(s.u);
            if (nu > opt.blowup_factor * norm0) {
                std::ostringstream msg;
                msg << "strang_evolve: ||u|| grew to " << nu << " (" << nu / norm0 << "x its initial value) at t = " << s.t;
                throw BlowUpError(msg.str());
            }
        }
        const bool last = step == steps;
        if (last && !opt.keep_samples) {
            if (opt.on_sample) opt.on_sample(s);
            traj.samples.push_back(s);
        } else if (step % opt.stride == 0 || last) {
            emit(s);
        }
    }
    return traj;
}

LinearNonlinearParts linear_nonlinear_split(const Trajectory& traj, double T, double t)
{
    if (traj.samples.empty()) throw ContractError("linear_nonlinear_split: empty trajectory");
    const double lo = traj.samples.front().t, hi = traj.samples.back().t;
    if (t < T || T < lo - 1e-12 || t > hi + 1e-12)
        throw ContractError("linear_nonlinear_split: need T <= t inside the trajectory span");
    const FieldPair* base = find_sample(traj, T);
    const FieldPair* now = find_sample(traj, t);
    if (!base || !now) throw ContractError("linear_nonlinear_split: T and t must be sample times");
    LinearNonlinearParts parts;
    parts.linear = linear_flow(*base, now->t - base->t);
    parts.linear.t = now->t;
    parts.nonlinear = *now;
    parts.nonlinear.u = now->u - parts.linear.u;
    parts.nonlinear.v = now->v - parts.linear.v;
    return parts;
}

}  // namespace qnls
