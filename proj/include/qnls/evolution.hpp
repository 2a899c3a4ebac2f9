#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qnls/spectral_core.hpp"

namespace qnls {

// State of  i u_t + u_xx = v conj(u),  i v_t + alpha v_xx = u^2 / 2.
struct FieldPair {
    SpectralField u;
    SpectralField v;
    double t = 0.0;
    double alpha = 0.25;

    const FourierGrid& grid() const { return u.grid; }
};

FieldPair make_state(SpectralField u, SpectralField v, double alpha, double t = 0.0);
FieldPair zero_state(const FourierGrid& g, double alpha);

// Default experiment data: complex Gaussian coefficients on |k| <= band (mode index),
// optionally shaped by <xi>^{-envelope}, each component rescaled to the requested H^s norm.
struct DataSpec {
    std::uint64_t seed = 1;
    int band = -1;  // -1 means n/8
    double envelope = 0.0;
    double s = 0.0;
    double norm_u = 1.0;
    double norm_v = 1.0;
};

FieldPair random_state(const FourierGrid& g, double alpha, const DataSpec& spec);

// u^ <- e^{-i t xi^2} u^,  v^ <- e^{-i alpha t xi^2} v^
FieldPair linear_flow(const FieldPair& s, double t);

// right side of the nonlinear part: (-i P(v conj u), -(i/2) P(u^2)), P the band projection
// without the Nyquist mode
std::pair<SpectralField, SpectralField> nonlinear_rhs(const SpectralField& u, const SpectralField& v);

// one classical RK4 step of the nonlinear part
FieldPair nonlinear_substep(const FieldPair& s, double dt);

struct EvolveOptions {
    double T = 1.0;
    double dt = 1e-3;
    int stride = 1;            // keep every stride-th step
    bool nonlinear = true;     // false gives the free flow, for checks
    bool keep_samples = true;  // false keeps only the first and last state
    double blowup_factor = 1e6;
    std::function<void(const FieldPair&)> on_sample;
};

struct Trajectory {
    std::vector<FieldPair> samples;
    double dt = 0.0;
    int stride = 1;
    int order = 2;
};

// Strang splitting: half linear step, RK4 nonlinear step, half linear step.
// Runs round(T/dt) steps; the Nyquist mode of the initial data is discarded.
Trajectory strang_evolve(const FieldPair& init, const EvolveOptions& opt);

struct LinearNonlinearParts {
    FieldPair linear;
    FieldPair nonlinear;
};

// Free evolution from the sample at time T to time t, and the remainder.
LinearNonlinearParts linear_nonlinear_split(const Trajectory& traj, double T, double t);

}  // namespace qnls
