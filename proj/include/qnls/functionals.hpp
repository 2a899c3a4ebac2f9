#pragma once

#include <functional>
#include <vector>

#include "qnls/evolution.hpp"
#include "qnls/spectral_core.hpp"

namespace qnls {

// k-ary multiplier on the hyperplane xi_1 + ... + xi_k = 0.
//
// grid_sums lists slot subsets (bit j = slot j+1) whose frequency sum must itself be a
// band mode other than Nyquist. Elongated multipliers need this: the inner sum stands
// for the frequency of a product that the Galerkin flow truncated.
struct Multiplier {
    int arity = 0;
    std::function<cplx(const double* xi)> eval;
    std::vector<unsigned> grid_sums;
};

Multiplier constant_multiplier(int arity, cplx c);

// X_j^k(M): argument j (1-indexed) replaced by xi_j + ... + xi_{j+k}.
Multiplier elongate(const Multiplier& M, int j, int k);

// conjugated slots use conj(f^(-xi))
using Pattern = std::vector<bool>;
using FieldRefs = std::vector<std::reference_wrapper<const SpectralField>>;

// sum over band tuples with xi_1 + ... + xi_k = 0 of M * prod f_j^(xi_j), weight (dxi/2pi)^{k-1}.
// Parallel over the first slot; partials are reduced pairwise in a fixed order.
cplx lambda_k(const Multiplier& M, const FieldRefs& fields, const Pattern& pattern);

// Lambda_4 of M4(xi) = M3(xi_p, xi_i + xi_j, xi_q), {p < q} the slots outside the pair (i, j),
// with the pair sum restricted to the band. Evaluated as Lambda_3 against the dealiased
// product of slots i and j: cost n^2 instead of n^3.
cplx lambda4_paired(const Multiplier& M3, const FieldRefs& fields, const Pattern& pattern, int i, int j);

// 1/2 ||u||^2 + ||v||^2
double mass(const FieldPair& s);
double mass_lambda_form(const FieldPair& s);

// ||u_x||^2 + alpha ||v_x||^2 + Re int conj(v) u^2
double energy(const FieldPair& s);
// -Lambda_2(xi1 xi2; u, ubar) - alpha Lambda_2(xi1 xi2; v, vbar) + Re Lambda_3(1; u, vbar, u)
double energy_lambda_form(const FieldPair& s);

}  // namespace qnls
