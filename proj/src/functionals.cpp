#include "qnls/functionals.hpp"

#include <array>
#include <cmath>
#include <string>

#include "qnls/error.hpp"
#include "qnls/parallel.hpp"

namespace qnls {

namespace {

constexpr int max_arity = 8;

cplx pairwise_sum(const cvec& v, std::size_t lo, std::size_t hi)
{
    if (hi - lo == 0) return {};
    if (hi - lo == 1) return v[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

void check_inputs(int arity, const FieldRefs& fields, const Pattern& pattern, const char* op)
{
    if (arity < 2 || arity > max_arity)
        throw ContractError(std::string(op) + ": arity must be in [2, 8], got " + std::to_string(arity));
    if (static_cast<int>(fields.size()) != arity || static_cast<int>(pattern.size()) != arity)
        throw ContractError(std::string(op) + ": multiplier arity " + std::to_string(arity) + " but " +
                            std::to_string(fields.size()) + " fields and " + std::to_string(pattern.size()) +
                            " pattern flags");
    for (const auto& f : fields)
        if (!(f.get().grid == fields.front().get().grid))
            throw ContractError(std::string(op) + ": fields live on different grids");
}

std::vector<cvec> slot_values(const FieldRefs& fields, const Pattern& pattern)
{
    std::vector<cvec> vals;
    for (std::size_t j = 0; j < fields.size(); ++j) {
        const SpectralField& f = fields[j];
        vals.push_back(pattern[j] ? conjugate(f).coeffs : f.coeffs);
    }
    return vals;
}

}  // namespace

Multiplier constant_multiplier(int arity, cplx c)
{
    Multiplier m;
    m.arity = arity;
    m.eval = [c](const double*) { return c; };
    return m;
}

Multiplier elongate(const Multiplier& M, int j, int k)
{
    if (j < 1 || j > M.arity)
        throw ContractError("elongate: slot " + std::to_string(j) + " outside 1.." + std::to_string(M.arity));
    if (k < 0 || M.arity + k > max_arity) throw ContractError("elongate: bad extension " + std::to_string(k));
    Multiplier out;
    out.arity = M.arity + k;
    const int a = M.arity;
    auto inner = M.eval;
    out.eval = [inner, a, j, k](const double* xi) {
        std::array<double, max_arity> y{};
        for (int s = 0; s < j - 1; ++s) y[s] = xi[s];
        double sum = 0.0;
        for (int s = j - 1; s <= j - 1 + k; ++s) sum += xi[s];
        y[j - 1] = sum;
        for (int s = j; s < a; ++s) y[s] = xi[s + k];
        return inner(y.data());
    };
    // old slot s maps to new slots s (s < j), j..j+k (s = j), s+k (s > j)
    auto widen = [j, k](unsigned mask) {
        unsigned out_mask = 0;
        for (int s = 1; s <= max_arity; ++s) {
            if (!(mask & (1u << (s - 1)))) continue;
            if (s < j) out_mask |= 1u << (s - 1);
            else if (s == j)
                for (int t = j; t <= j + k; ++t) out_mask |= 1u << (t - 1);
            else out_mask |= 1u << (s + k - 1);
        }
        return out_mask;
    };
    for (unsigned m : M.grid_sums) out.grid_sums.push_back(widen(m));
    if (k > 0) out.grid_sums.push_back(widen(1u << (j - 1)));
    return out;
}

cplx lambda_k(const Multiplier& M, const FieldRefs& fields, const Pattern& pattern)
{
    const int K = M.arity;
    check_inputs(K, fields, pattern, "lambda_k");
    const FourierGrid& g = fields.front().get().grid;
    const int n = g.n;
    const int kmin = g.kmin(), kmax = g.kmax();
    const auto vals = slot_values(fields, pattern);
    const auto xi_of = g.frequencies();

    cvec partial(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t s1) {
        const cplx v1 = vals[0][s1];
        if (v1 == cplx{}) return;
        std::array<int, max_arity> mode{};
        std::array<double, max_arity> xi{};
        std::array<cplx, max_arity> prod{};
        mode[0] = g.mode(static_cast<int>(s1));
        xi[0] = xi_of[s1];
        prod[0] = v1;
        cplx acc{};

        auto admissible = [&] {
            for (unsigned mask : M.grid_sums) {
                int s = 0;
                for (int t = 0; t < K; ++t)
                    if (mask & (1u << t)) s += mode[t];
                if (s <= -n / 2 || s >= n / 2) return false;
            }
            return true;
        };

        // depth-first over slots 2..K-1, last slot fixed by the hyperplane
        std::function<void(int, int)> walk = [&](int depth, int running) {
            if (depth == K - 1) {
                const int last = -running;
                if (last < kmin || last > kmax) return;
                const cplx vl = vals[K - 1][static_cast<std::size_t>(g.slot(last))];
                if (vl == cplx{}) return;
                mode[K - 1] = last;
                xi[K - 1] = g.xi(last);
                if (!admissible()) return;
                acc += M.eval(xi.data()) * prod[K - 2] * vl;
                return;
            }
            for (int s = 0; s < n; ++s) {
                const cplx vs = vals[depth][static_cast<std::size_t>(s)];
                if (vs == cplx{}) continue;
                mode[depth] = g.mode(s);
                xi[depth] = xi_of[static_cast<std::size_t>(s)];
                prod[depth] = prod[depth - 1] * vs;
                walk(depth + 1, running + mode[depth]);
            }
        };
        walk(1, mode[0]);
        partial[s1] = acc;
    });
    const cplx total = pairwise_sum(partial, 0, partial.size());
    return total * std::pow(g.measure(), K - 1);
}

cplx lambda4_paired(const Multiplier& M3, const FieldRefs& fields, const Pattern& pattern, int i, int j)
{
    if (M3.arity != 3) throw ContractError("lambda4_paired: collapsed multiplier must have arity 3");
    check_inputs(4, fields, pattern, "lambda4_paired");
    if (i < 1 || j > 4 || i >= j) throw ContractError("lambda4_paired: need 1 <= i < j <= 4");
    int others[2], c = 0;
    for (int s = 1; s <= 4; ++s)
        if (s != i && s != j) others[c++] = s;
    auto slot = [&](int s) {
        const SpectralField& f = fields[static_cast<std::size_t>(s - 1)];
        return pattern[static_cast<std::size_t>(s - 1)] ? conjugate(f) : f;
    };
    SpectralField a = slot(others[0]);
    SpectralField q = slot(others[1]);
    SpectralField pair = convolve(slot(i), slot(j));
    zero_nyquist(pair);
    return lambda_k(M3, {a, pair, q}, {false, false, false});
}

double mass(const FieldPair& s)
{
    const double nu = l2_norm(s.u), nv = l2_norm(s.v);
    return 0.5 * nu * nu + nv * nv;
}

double mass_lambda_form(const FieldPair& s)
{
    const auto one = constant_multiplier(2, 1.0);
    return 0.5 * lambda_k(one, {s.u, s.u}, {false, true}).real() + lambda_k(one, {s.v, s.v}, {false, true}).real();
}

double energy(const FieldPair& s)
{
    const auto& g = s.grid();
    double grad = 0.0;
    for (int k = g.kmin(); k <= g.kmax(); ++k) {
        const double xi2 = g.xi(k) * g.xi(k);
        grad += xi2 * (std::norm(s.u.at(k)) + s.alpha * std::norm(s.v.at(k)));
    }
    grad *= g.measure();
    // cubic term by quadrature on a grid fine enough that the triple product does not alias
    const int M = 2 * g.n;
    const cvec u = inverse_padded(s.u, M);
    const cvec v = inverse_padded(s.v, M);
    double cubic = 0.0;
    for (int q = 0; q < M; ++q)
        cubic += std::real(std::conj(v[static_cast<std::size_t>(q)]) * u[static_cast<std::size_t>(q)] *
                           u[static_cast<std::size_t>(q)]);
    cubic *= g.L / M;
    return grad + cubic;
}

double energy_lambda_form(const FieldPair& s)
{
    Multiplier xx;
    xx.arity = 2;
    xx.eval = [](const double* xi) { return cplx(xi[0] * xi[1]); };
    const auto one = constant_multiplier(3, 1.0);
    const cplx a = lambda_k(xx, {s.u, s.u}, {false, true});
    const cplx b = lambda_k(xx, {s.v, s.v}, {false, true});
    const cplx c = lambda_k(one, {s.u, s.v, s.u}, {false, true, false});
    return -a.real() - s.alpha * b.real() + c.real();
}

}  // namespace qnls
