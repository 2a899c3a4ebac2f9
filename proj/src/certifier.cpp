#include "qnls/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qnls/error.hpp"
#include "qnls/fft.hpp"
#include "qnls/fit.hpp"
#include "qnls/parallel.hpp"

namespace qnls {

namespace {

constexpr double gl_nodes[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
constexpr double gl_weights[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};

bool is_dyadic(double N) { return N >= 1.0 && std::exp2(std::round(std::log2(N))) == N; }

// |E_A intersect (d - E_B)|
double overlap(const std::vector<Interval>& EA, const std::vector<Interval>& EB, double d)
{
    double len = 0.0;
    for (const auto& I : EA)
        for (const auto& J : EB) {
            const double lo = std::max(I.lo, d - J.hi);
            const double hi = std::min(I.hi, d - J.lo);
            if (hi > lo) len += hi - lo;
        }
    return len;
}

// a_A x^2 + a_B y^2 - a_o (x + y)^2 over [x0, x1] x [y0, y1]; the constants are added by the caller
Interval quadratic_range(double aA, double aB, double ao, double x0, double x1, double y0, double y1)
{
    auto g = [&](double x, double y) { return aA * x * x + aB * y * y - ao * (x + y) * (x + y); };
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    auto take = [&](double x, double y) {
        const double v = g(x, y);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    };
    for (double x : {x0, x1})
        for (double y : {y0, y1}) take(x, y);
    for (double x : {x0, x1})
        if (aB != ao) {
            const double y = ao * x / (aB - ao);
            if (y > y0 && y < y1) take(x, y);
        }
    for (double y : {y0, y1})
        if (aA != ao) {
            const double x = ao * y / (aA - ao);
            if (x > x0 && x < x1) take(x, y);
        }
    if (x0 < 0.0 && x1 > 0.0 && y0 < 0.0 && y1 > 0.0) take(0.0, 0.0);
    return {lo, hi};
}

std::vector<Interval> symmetric_band(double inner, double outer)
{
    return {{-outer, -inner}, {inner, outer}};
}

void check_single(const SpaceTimeSet& A, const char* op)
{
    if (A.eta.size() != 1) throw ContractError(std::string(op) + ": set " + A.tag + " must have one eta interval");
}

}  // namespace

double SpaceTimeSet::eta_measure() const
{
    double m = 0.0;
    for (const auto& I : eta) m += I.width();
    return m;
}

double SpaceTimeSet::min_eta_width() const
{
    double w = std::numeric_limits<double>::infinity();
    for (const auto& I : eta) w = std::min(w, I.width());
    return w;
}

bool SpaceTimeSet::contains(double tau, double xi, double tol) const
{
    if (xi < xi_lo - tol || xi > xi_hi + tol) return false;
    const double e = tau - phase(xi);
    for (const auto& I : eta)
        if (e >= I.lo - tol && e <= I.hi + tol) return true;
    return false;
}

SpaceTimeSet make_set(double xi_lo, double xi_hi, Phase phase, std::vector<Interval> eta, std::string tag)
{
    if (!(xi_hi > xi_lo)) throw ContractError("make_set: empty xi interval for " + tag);
    if (eta.empty()) throw ContractError("make_set: no eta interval for " + tag);
    for (std::size_t i = 0; i < eta.size(); ++i) {
        if (!(eta[i].hi > eta[i].lo)) throw ContractError("make_set: empty eta interval for " + tag);
        if (i > 0 && eta[i].lo < eta[i - 1].hi) throw ContractError("make_set: eta intervals overlap for " + tag);
    }
    SpaceTimeSet A;
    A.xi_lo = xi_lo;
    A.xi_hi = xi_hi;
    A.phase = phase;
    A.eta = std::move(eta);
    A.tag = std::move(tag);
    return A;
}

Regime alpha_half(double beta)
{
    require(beta >= 0.0, "alpha_half: beta must be non-negative");
    Regime r;
    r.kind = RegimeKind::AlphaHalf;
    r.alpha = 0.5;
    r.beta = beta;
    return r;
}

Regime alpha_mid(double alpha)
{
    require(alpha > 0.5 && alpha < 1.0, "alpha_mid: alpha must lie in (1/2, 1)");
    Regime r;
    r.kind = RegimeKind::AlphaMid;
    r.alpha = alpha;
    return r;
}

Regime alpha_small(double alpha, double C)
{
    require(alpha > 0.0 && alpha < 0.5, "alpha_small: alpha must lie in (0, 1/2)");
    require(C > 0.0, "alpha_small: C must be positive");
    Regime r;
    r.kind = RegimeKind::AlphaSmall;
    r.alpha = alpha;
    r.C = C;
    return r;
}

Regime alpha_small_endpoint(double alpha, int m)
{
    require(alpha > 0.0 && alpha < 0.5, "alpha_small_endpoint: alpha must lie in (0, 1/2)");
    require(m >= 1, "alpha_small_endpoint: m must be >= 1");
    Regime r;
    r.kind = RegimeKind::AlphaSmallEndpoint;
    r.alpha = alpha;
    r.m = m;
    return r;
}

std::string to_string(RegimeKind k)
{
    switch (k) {
    case RegimeKind::AlphaHalf: return "alpha-half";
    case RegimeKind::AlphaMid: return "alpha-mid";
    case RegimeKind::AlphaSmall: return "alpha-small";
    case RegimeKind::AlphaSmallEndpoint: return "alpha-small-endpoint";
    }
    return "?";
}

CounterexampleFamily build_counterexample(const Regime& r, double N)
{
    require(N >= 16.0 && std::isfinite(N), "build_counterexample: N must be >= 16");
    CounterexampleFamily f;
    f.regime = r;
    f.N = N;
    f.v_phase = Phase{r.alpha, 0.0};
    const Phase minus_sq{-1.0, 0.0}, sq{1.0, 0.0}, v_sq{r.alpha, 0.0};
    const std::vector<Interval> unit{{-1.0, 1.0}};

    switch (r.kind) {
    case RegimeKind::AlphaHalf: {
        const double w = std::pow(N, -r.beta);
        f.A1 = make_set(-N - w, -N + w, minus_sq, unit, "A1");
        f.A2 = make_set(2.0 * N - w, 2.0 * N + w, v_sq, unit, "A2");
        f.A3 = make_set(N - w, N + w, sq, unit, "A3");
        break;
    }
    case RegimeKind::AlphaMid: {
        const double w = 1.0 / N;
        const double c2 = 2.0 / (1.0 + std::sqrt(2.0 * r.alpha - 1.0));
        f.A1 = make_set(-N - w, -N + w, minus_sq, unit, "A1");
        f.A2 = make_set(c2 * N - w, c2 * N + w, v_sq, unit, "A2");
        f.A3 = make_set((c2 - 1.0) * N - w, (c2 - 1.0) * N + w, sq, unit, "A3");
        break;
    }
    case RegimeKind::AlphaSmall: {
        const double w = 1.0 / N;
        const double h = 1.0 + 1.5 * r.C;
        f.A1 = make_set(-N - w, -N, minus_sq, unit, "A1");
        f.A2 = make_set(N, N + w, v_sq, {{-h, h}}, "A2");
        f.A3 = make_set(-w, -0.5 * w, Phase{1.0, -(1.0 - r.alpha) * N * N}, {{0.0, r.C}}, "A3");
        break;
    }
    case RegimeKind::AlphaSmallEndpoint: {
        const int m = r.m;
        // the construction needs 4^m << N; required here as 4^{m+1} <= N
        require(std::pow(4.0, m + 1) <= N, "build_counterexample: endpoint family needs 4^(m+1) <= N");
        const double w = std::pow(4.0, m - 10) / N;
        auto p4 = [](int e) { return std::pow(4.0, e); };
        for (int j = 0; j < m; ++j) {
            f.A1j.push_back(make_set(-N - w, -N, minus_sq, symmetric_band(p4(j - 2), p4(j - 1)),
                                     "A1," + std::to_string(j)));
            f.A2j.push_back(make_set(N, N + w, v_sq, symmetric_band(p4(j - 3), p4(j - 2)), "A2," + std::to_string(j)));
        }
        f.A1 = make_set(-N - w, -N, minus_sq, symmetric_band(p4(m - 2), p4(m + 2)), "A1,m");
        f.A2 = make_set(N, N + w, v_sq, symmetric_band(p4(m - 3), p4(m - 2)), "A2,m");
        f.A3 = make_set(0.5 * w, w, Phase{1.0, -(1.0 - r.alpha) * N * N}, {{p4(m - 1), p4(m + 1)}}, "A3");
        break;
    }
    }
    return f;
}

SpaceTimeField sample_indicator(const SpaceTimeSet& A, int samples_per_width)
{
    require(samples_per_width >= 1, "sample_indicator: samples_per_width must be >= 1");
    SpaceTimeField f;
    f.shear = A.phase;
    f.nxi = samples_per_width;
    f.dxi = A.xi_width() / f.nxi;
    f.xi0 = A.xi_lo + 0.5 * f.dxi;
    const double hull = A.eta_max() - A.eta_min();
    const double want = A.min_eta_width() / samples_per_width;
    const double cells = std::ceil(hull / want - 1e-9);
    if (cells > 1e7) throw ResolutionError("sample_indicator: set " + A.tag + " needs more than 1e7 eta samples");
    f.neta = static_cast<int>(cells);
    f.deta = hull / f.neta;
    f.eta0 = A.eta_min() + 0.5 * f.deta;
    f.data.assign(static_cast<std::size_t>(f.nxi) * f.neta, 0.0);
    for (int j = 0; j < f.neta; ++j) {
        const double e = f.eta(j);
        bool in = false;
        for (const auto& I : A.eta) in = in || (e >= I.lo && e <= I.hi);
        if (!in) continue;
        for (int i = 0; i < f.nxi; ++i) f.at(i, j) = 1.0;
    }
    f.min_samples_per_width = std::min<double>(samples_per_width, A.min_eta_width() / f.deta);
    return f;
}

double xsb_norm(const SpaceTimeField& f, double s, double b, const Phase& phase)
{
    if (f.min_samples_per_width < min_samples_required) {
        const double factor = std::ceil(min_samples_required / std::max(f.min_samples_per_width, 1e-300));
        throw ResolutionError("xsb_norm: only " + std::to_string(f.min_samples_per_width) +
                              " samples across the narrowest feature, need " +
                              std::to_string(static_cast<int>(min_samples_required)) + "; refine the grid about " +
                              std::to_string(static_cast<long long>(factor)) + "x");
    }
    const double da = f.shear.a - phase.a, dc = f.shear.c - phase.c;
    double acc = 0.0;
    for (int i = 0; i < f.nxi; ++i) {
        const double xi = f.xi(i);
        const double wx = std::pow(1.0 + xi * xi, s);
        double row = 0.0;
        for (int j = 0; j < f.neta; ++j) {
            const double v = f.at(i, j);
            if (v == 0.0) continue;
            const double mod = f.eta(j) + da * xi * xi + dc;
            row += std::pow(1.0 + mod * mod, b) * v * v;
        }
        acc += wx * row;
    }
    return std::sqrt(acc * f.dxi * f.deta);
}

double xsb_norm_of_set(const SpaceTimeSet& A, double s, double b, const Phase& phase, int samples_per_width)
{
    double acc = 0.0;
    for (const auto& I : A.eta) {
        const SpaceTimeSet piece = make_set(A.xi_lo, A.xi_hi, A.phase, {I}, A.tag);
        const double v = xsb_norm(sample_indicator(piece, samples_per_width), s, b, phase);
        acc += v * v;
    }
    return std::sqrt(acc);
}

double conv_at(const SpaceTimeSet& A, const SpaceTimeSet& B, const Phase& out, double eta, double xi, int panels)
{
    require(panels >= 1, "conv_at: panels must be >= 1");
    const double lo = std::max(A.xi_lo, xi - B.xi_hi);
    const double hi = std::min(A.xi_hi, xi - B.xi_lo);
    if (!(hi > lo)) return 0.0;
    const double h = (hi - lo) / panels;
    const double base = eta + out(xi);
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * h;
        for (int q = 0; q < 4; ++q) {
            const double x1 = mid + 0.5 * h * gl_nodes[q];
            const double d = base - A.phase(x1) - B.phase(xi - x1);
            acc += gl_weights[q] * overlap(A.eta, B.eta, d);
        }
    }
    return acc * 0.5 * h;
}

SpaceTimeField convolution_field(const SpaceTimeSet& A, const SpaceTimeSet& B, const Phase& out, int nxi, int neta,
                                 int panels)
{
    require(nxi >= 1 && neta >= 1, "convolution_field: grid sizes must be positive");
    const double xlo = A.xi_lo + B.xi_lo, xhi = A.xi_hi + B.xi_hi;
    const Interval g = quadratic_range(A.phase.a, B.phase.a, out.a, A.xi_lo, A.xi_hi, B.xi_lo, B.xi_hi);
    const double c = A.phase.c + B.phase.c - out.c;
    const double elo = g.lo + c + A.eta_min() + B.eta_min();
    const double ehi = g.hi + c + A.eta_max() + B.eta_max();

    SpaceTimeField f;
    f.shear = out;
    f.nxi = nxi;
    f.neta = neta;
    f.dxi = (xhi - xlo) / nxi;
    f.deta = (ehi - elo) / neta;
    f.xi0 = xlo + 0.5 * f.dxi;
    f.eta0 = elo + 0.5 * f.deta;
    f.data.assign(static_cast<std::size_t>(nxi) * neta, 0.0);
    parallel_for(static_cast<std::size_t>(nxi), [&](std::size_t i) {
        const double xi = f.xi(static_cast<int>(i));
        for (int j = 0; j < neta; ++j) f.at(static_cast<int>(i), j) = conv_at(A, B, out, f.eta(j), xi, panels);
    });
    const double feature_xi = std::min(A.xi_width(), B.xi_width());
    const double feature_eta = std::min(A.min_eta_width(), B.min_eta_width());
    f.min_samples_per_width = std::min(feature_xi / f.dxi, feature_eta / f.deta);
    return f;
}

double conv_lower_bound(const SpaceTimeSet& A1, const SpaceTimeSet& A2, const SpaceTimeSet& A3, int samples,
                        int panels)
{
    check_single(A3, "conv_lower_bound");
    require(samples >= 1, "conv_lower_bound: samples must be >= 1");
    double best = std::numeric_limits<double>::infinity();
    const double dx = A3.xi_width() / samples, de = A3.eta.front().width() / samples;
    for (int i = 0; i < samples; ++i)
        for (int j = 0; j < samples; ++j) {
            const double xi = A3.xi_lo + (i + 0.5) * dx;
            const double eta = A3.eta.front().lo + (j + 0.5) * de;
            best = std::min(best, conv_at(A1, A2, A3.phase, eta, xi, panels));
        }
    return best;
}

SpaceTimeField discrete_convolve(const SpaceTimeField& a, const SpaceTimeField& b)
{
    require(a.shear.a == 0.0 && b.shear.a == 0.0 && a.shear.c == 0.0 && b.shear.c == 0.0,
            "discrete_convolve: fields must be unsheared");
    require(std::abs(a.dxi - b.dxi) <= 1e-12 * a.dxi && std::abs(a.deta - b.deta) <= 1e-12 * a.deta,
            "discrete_convolve: grid steps differ");
    SpaceTimeField c;
    c.shear = Phase{0.0, 0.0};
    c.dxi = a.dxi;
    c.deta = a.deta;
    c.nxi = a.nxi + b.nxi - 1;
    c.neta = a.neta + b.neta - 1;
    c.xi0 = a.xi0 + b.xi0;
    c.eta0 = a.eta0 + b.eta0;
    c.min_samples_per_width = std::min(a.min_samples_per_width, b.min_samples_per_width);

    int P = 1, Q = 1;
    while (P < c.nxi) P <<= 1;
    while (Q < c.neta) Q <<= 1;
    auto load = [&](const SpaceTimeField& f) {
        cvec buf(static_cast<std::size_t>(P) * Q);
        for (int i = 0; i < f.nxi; ++i)
            for (int j = 0; j < f.neta; ++j) buf[static_cast<std::size_t>(i) * Q + j] = f.at(i, j);
        return buf;
    };
    auto transform2d = [&](cvec& buf, int sign) {
        for (int i = 0; i < P; ++i) fft::execute(buf.data() + static_cast<std::size_t>(i) * Q, Q, sign);
        cvec col(static_cast<std::size_t>(P));
        for (int j = 0; j < Q; ++j) {
            for (int i = 0; i < P; ++i) col[static_cast<std::size_t>(i)] = buf[static_cast<std::size_t>(i) * Q + j];
            fft::execute(col.data(), P, sign);
            for (int i = 0; i < P; ++i) buf[static_cast<std::size_t>(i) * Q + j] = col[static_cast<std::size_t>(i)];
        }
    };
    cvec fa = load(a), fb = load(b);
    transform2d(fa, -1);
    transform2d(fb, -1);
    for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
    transform2d(fa, +1);
    const double scale = a.dxi * a.deta / (static_cast<double>(P) * Q);
    c.data.assign(static_cast<std::size_t>(c.nxi) * c.neta, 0.0);
    for (int i = 0; i < c.nxi; ++i)
        for (int j = 0; j < c.neta; ++j) c.at(i, j) = scale * fa[static_cast<std::size_t>(i) * Q + j].real();
    return c;
}

double membership_dilation(const SpaceTimeSet& A3, const SpaceTimeSet& A1, const SpaceTimeSet& B, int samples)
{
    check_single(A3, "membership_dilation");
    check_single(A1, "membership_dilation");
    check_single(B, "membership_dilation");
    require(samples >= 2, "membership_dilation: samples must be >= 2");
    auto node = [samples](double lo, double hi, int i) { return lo + (hi - lo) * i / (samples - 1); };
    const double cx = 0.5 * (B.xi_lo + B.xi_hi), hx = 0.5 * B.xi_width();
    const double ce = 0.5 * (B.eta.front().lo + B.eta.front().hi), he = 0.5 * B.eta.front().width();
    double worst = 0.0;
    for (int i3 = 0; i3 < samples; ++i3)
        for (int j3 = 0; j3 < samples; ++j3) {
            const double xi = node(A3.xi_lo, A3.xi_hi, i3);
            const double tau = node(A3.eta.front().lo, A3.eta.front().hi, j3) + A3.phase(xi);
            for (int i1 = 0; i1 < samples; ++i1)
                for (int j1 = 0; j1 < samples; ++j1) {
                    const double xi1 = node(A1.xi_lo, A1.xi_hi, i1);
                    const double tau1 = node(A1.eta.front().lo, A1.eta.front().hi, j1) + A1.phase(xi1);
                    const double dxi = xi - xi1;
                    const double eta = (tau - tau1) - B.phase(dxi);
                    worst = std::max({worst, std::abs(dxi - cx) / hx, std::abs(eta - ce) / he});
                }
        }
    return worst;
}

std::vector<CertifyRecord> ratio_sweep(const Regime& r, double s, double b, const std::vector<double>& Ns,
                                       const CertifyResolution& res)
{
    if (r.kind == RegimeKind::AlphaSmallEndpoint)
        throw ContractError("ratio_sweep: the endpoint family is checked by endpoint_check");
    if (Ns.size() < 4) throw ContractError("ratio_sweep: need at least 4 N values, got " + std::to_string(Ns.size()));
    for (double N : Ns)
        if (!is_dyadic(N)) throw ContractError("ratio_sweep: N values must be powers of two");

    std::vector<CertifyRecord> out(Ns.size());
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        const auto fam = build_counterexample(r, Ns[i]);
        CertifyRecord rec;
        rec.regime = to_string(r.kind);
        rec.alpha = r.alpha;
        rec.s = s;
        rec.b = b;
        rec.N = Ns[i];
        rec.xsb_u = xsb_norm_of_set(fam.A1, s, b, fam.u_phase, res.set_samples);
        rec.xsb_v = xsb_norm_of_set(fam.A2, s, b, fam.v_phase, res.set_samples);
        const SpaceTimeField conv = convolution_field(fam.A1, fam.A2, fam.out_phase, res.nxi, res.neta, res.panels);
        const double num = xsb_norm(conv, s, b - 1.0, fam.out_phase);
        rec.conv_min = conv_lower_bound(fam.A1, fam.A2, fam.A3, 9, res.panels);
        rec.ratio = num / (rec.xsb_u * rec.xsb_v);
        out[i] = rec;
    }
    std::vector<double> x, y;
    for (const auto& rec : out) {
        x.push_back(rec.N);
        y.push_back(rec.ratio);
    }
    const LinearFit fit = fit_loglog(x, y);
    for (auto& rec : out) rec.slope = fit.slope;
    return out;
}

std::vector<double> endpoint_ratios(int m_max)
{
    require(m_max >= 1, "endpoint_ratios: m must be >= 1");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(m_max));
    // Kahan sums of a_j and a_j^2 over j < m
    long double s1 = 0.0L, c1 = 0.0L, s2 = 0.0L, c2 = 0.0L;
    auto add = [](long double& s, long double& c, long double x) {
        const long double y = x - c;
        const long double t = s + y;
        c = (t - s) - y;
        s = t;
    };
    for (int m = 1; m <= m_max; ++m) {
        const long double a = 1.0L / static_cast<long double>(m);  // a_{m-1} = 1/m
        add(s1, c1, a);
        add(s2, c2, a * a);
        out.push_back(static_cast<double>((s1 + 1.0L) / (s2 + 1.0L)));
    }
    return out;
}

double endpoint_check(int m) { return endpoint_ratios(m).back(); }

}  // namespace qnls
