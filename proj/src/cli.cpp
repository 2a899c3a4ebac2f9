#include "qnls/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qnls/certifier.hpp"
#include "qnls/config.hpp"
#include "qnls/csv.hpp"
#include "qnls/error.hpp"
#include "qnls/evolution.hpp"
#include "qnls/fft.hpp"
#include "qnls/functionals.hpp"
#include "qnls/imethod.hpp"
#include "qnls/parallel.hpp"
#include "qnls/planner.hpp"
#include "qnls/resonance.hpp"
#include "qnls/rng.hpp"

namespace qnls::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* schema_version = "qnls-csv-1";

using Values = std::map<std::string, std::string>;

struct KeySpec {
    std::string name;
    std::string def;
    std::string help;
};

struct Output {
    std::string file;
    csv::Table table;
};

struct Command {
    std::string name;
    std::string help;
    std::vector<KeySpec> keys;
    std::string columns;  // help footer
    std::function<std::vector<Output>(const Values&, std::ostream&)> body;
};

// ---- typed access to the merged string values

double num(const Values& v, const std::string& k) { return parse_number(v.at(k), k); }
int integer(const Values& v, const std::string& k)
{
    const long long x = parse_integer(v.at(k), k);
    if (x < -2147483647LL || x > 2147483647LL) throw ConfigError(k + ": out of range");
    return static_cast<int>(x);
}
std::uint64_t seed_of(const Values& v)
{
    const long long x = parse_integer(v.at("seed"), "seed");
    if (x < 0) throw ConfigError("seed: must be non-negative");
    return static_cast<std::uint64_t>(x);
}
std::vector<double> list(const Values& v, const std::string& k) { return parse_list(v.at(k), k); }
bool boolean(const Values& v, const std::string& k)
{
    const std::string& s = v.at(k);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(k + ": expected true or false, got '" + s + "'");
}

DataSpec data_spec(const Values& v, double norm_u, double norm_v)
{
    DataSpec d;
    d.seed = seed_of(v);
    d.band = integer(v, "band");
    d.envelope = num(v, "envelope");
    d.s = num(v, "data_s");
    d.norm_u = norm_u;
    d.norm_v = norm_v;
    return d;
}

// ---- subcommands

std::vector<Output> cmd_simulate(const Values& v, std::ostream& log)
{
    const FourierGrid g = make_grid(num(v, "L"), integer(v, "n"));
    const double alpha = num(v, "alpha");
    const FieldPair init = random_state(g, alpha, data_spec(v, num(v, "norm_u"), num(v, "norm_v")));
    const IMultiplier I = make_imultiplier(num(v, "N"), num(v, "rho"));
    EvolveOptions opt;
    opt.T = num(v, "T");
    opt.dt = num(v, "dt");
    opt.stride = integer(v, "stride");
    opt.nonlinear = boolean(v, "nonlinear");
    const Trajectory traj = strang_evolve(init, opt);

    Output o{"trajectory.csv", {{"t", "mass", "energy", "E2", "E3", "norm_u", "norm_v"}, {}}};
    const bool has_e3 = alpha < 0.5;
    std::vector<std::vector<csv::Value>> rows(traj.samples.size());
    parallel_for(rows.size(), [&](std::size_t i) {
        const FieldPair& s = traj.samples[i];
        rows[i] = {s.t,
                   mass(s),
                   energy(s),
                   modified_mass_e2(s, I),
                   has_e3 ? csv::Value(modified_mass_e3(s, I)) : csv::Value(std::string()),
                   l2_norm(s.u),
                   l2_norm(s.v)};
    });
    for (auto& r : rows) o.table.add(std::move(r));
    log << "simulate: " << traj.samples.size() << " samples to t = " << traj.samples.back().t << "\n";
    return {o};
}

std::vector<Output> cmd_conserve(const Values& v, std::ostream& log)
{
    const FourierGrid g = make_grid(num(v, "L"), integer(v, "n"));
    const double amp = num(v, "amplitude");
    const FieldPair init = random_state(g, num(v, "alpha"), data_spec(v, amp, amp));
    EvolveOptions opt;
    opt.T = num(v, "T");
    opt.dt = num(v, "dt");
    opt.stride = integer(v, "stride");
    const Trajectory traj = strang_evolve(init, opt);

    Output o{"conserve.csv", {{"t", "mass", "energy", "mass_drift", "energy_drift"}, {}}};
    const double m0 = mass(traj.samples.front()), e0 = energy(traj.samples.front());
    double worst_m = 0.0, worst_e = 0.0;
    for (const auto& s : traj.samples) {
        const double m = mass(s), e = energy(s);
        const double dm = (m - m0) / std::abs(m0), de = (e - e0) / std::abs(e0);
        worst_m = std::max(worst_m, std::abs(dm));
        worst_e = std::max(worst_e, std::abs(de));
        o.table.add({s.t, m, e, dm, de});
    }
    log << "conserve: max |mass drift| " << csv::format(worst_m) << ", max |energy drift| " << csv::format(worst_e)
        << "\n";
    return {o};
}

std::vector<Output> cmd_imethod_sweep(const Values& v, std::ostream& log)
{
    SweepConfig cfg;
    cfg.L = num(v, "L");
    cfg.n = integer(v, "n");
    cfg.alpha = num(v, "alpha");
    cfg.rho = num(v, "rho");
    cfg.N_list = list(v, "N");
    cfg.dt = num(v, "dt");
    cfg.delta = num(v, "delta");
    cfg.nonlinear = boolean(v, "nonlinear");
    cfg.data = data_spec(v, num(v, "norm_u"), num(v, "norm_v"));
    const SweepResult r = almost_conservation_sweep(cfg);

    Output o{"imethod_sweep.csv",
             {{"N", "rho", "alpha", "dt", "n", "L", "e2_increment", "e3_increment", "e3_minus_e2", "fitted_gamma",
               "fitted_beta"},
              {}}};
    for (const auto& x : r.records)
        o.table.add({x.N, x.rho, x.alpha, x.dt, static_cast<long long>(x.n), x.L, x.e2_increment, x.e3_increment,
                     x.e3_minus_e2, x.fitted_gamma, x.fitted_beta});
    log << "imethod-sweep: gamma " << csv::format(r.gamma) << " (R^2 " << csv::format(r.gamma_r2) << "), beta "
        << csv::format(r.beta) << " (R^2 " << csv::format(r.beta_r2) << ")\n";
    return {o};
}

std::vector<Output> cmd_certify(const Values& v, std::ostream& log)
{
    const std::string kind = v.at("regime");
    const std::string a = v.at("alpha");
    auto alpha_or = [&](double d) { return a == "default" ? d : parse_number(a, "alpha"); };

    if (kind == "endpoint") {
        const int m_max = integer(v, "m");
        const std::vector<double> ratios = endpoint_ratios(m_max);
        Output o{"endpoint.csv", {{"m", "ratio"}, {}}};
        std::vector<int> ms;
        for (long long m = 1; m <= m_max; m *= 2) ms.push_back(static_cast<int>(m));
        if (ms.back() != m_max) ms.push_back(m_max);
        for (int m : ms) o.table.add({static_cast<long long>(m), ratios[static_cast<std::size_t>(m - 1)]});
        const auto it = std::find_if(ratios.begin(), ratios.end(), [](double x) { return x > 5.0; });
        if (it == ratios.end())
            log << "certify endpoint: ratio " << csv::format(ratios.back()) << " at m = " << m_max << "\n";
        else
            log << "certify endpoint: ratio first exceeds 5 at m = " << (it - ratios.begin()) + 1 << "\n";
        return {o};
    }

    Regime r;
    if (kind == "alpha-half") {
        if (a != "default" && parse_number(a, "alpha") != 0.5) throw ConfigError("alpha: alpha-half fixes alpha = 0.5");
        r = alpha_half(num(v, "beta"));
    } else if (kind == "alpha-mid") {
        r = alpha_mid(alpha_or(0.625));
    } else if (kind == "alpha-small") {
        r = alpha_small(alpha_or(0.25), num(v, "C"));
    } else {
        throw ConfigError("regime: expected alpha-half, alpha-mid, alpha-small or endpoint, got '" + kind + "'");
    }
    CertifyResolution res;
    res.nxi = integer(v, "nxi");
    res.neta = integer(v, "neta");
    res.panels = integer(v, "panels");
    res.set_samples = integer(v, "set_samples");
    const auto recs = ratio_sweep(r, num(v, "s"), num(v, "b"), list(v, "N"), res);

    Output o{"certify.csv", {{"regime", "alpha", "s", "b", "N", "xsb_u", "xsb_v", "conv_min", "ratio", "slope"}, {}}};
    for (const auto& x : recs) o.table.add({x.regime, x.alpha, x.s, x.b, x.N, x.xsb_u, x.xsb_v, x.conv_min, x.ratio, x.slope});
    log << "certify " << kind << ": slope " << csv::format(recs.front().slope) << "\n";
    return {o};
}

std::vector<Output> cmd_resonance_check(const Values& v, std::ostream& log)
{
    const std::vector<double> alphas = list(v, "alpha");
    const int tuples = integer(v, "tuples");
    const double scale = num(v, "scale");
    const double theta = num(v, "theta");
    require(tuples >= 1, "tuples: must be >= 1");
    require(scale > 0.0, "scale: must be positive");

    Output o{"resonance.csv", {{"check", "alpha", "tuples", "max_rel_error", "min_value", "max_value"}, {}}};
    for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
        const double alpha = alphas[ai];
        const H3Factorization f = h3_factor(alpha);
        Rng rng(seed_of(v), ai);
        struct Acc {
            double err = 0.0, lo = INFINITY, hi = -INFINITY;
            void add(double e, double x)
            {
                err = std::max(err, e);
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
        };
        Acc a_h3, a_h4, a_g14, a_g4, a_gr, a_tau;
        std::map<std::string, long long> omega;
        for (int i = 0; i < tuples; ++i) {
            const double x1 = rng.uniform(-scale, scale), x2 = rng.uniform(-scale, scale);
            const double x3 = rng.uniform(-scale, scale);
            const double x4 = -(x1 + x2 + x3);
            const double t2 = -(x1 + x3);
            const double q3 = x1 * x1 + t2 * t2 + x3 * x3;
            const double h = h3(x1, t2, x3, alpha);
            a_h3.add(std::abs(h - f.evaluate(x1, x3)) / q3, h / q3);
            const double q4 = x1 * x1 + x2 * x2 + x3 * x3 + x4 * x4;
            const double l1 = std::abs(x1) + std::abs(x2) + std::abs(x3) + std::abs(x4);
            const H4Result r = h4_and_g(x1, x2, x3, x4, alpha);
            a_h4.add(std::abs(r.h4_direct - r.h4) / q4, r.h4 / q4);
            a_g14.add(std::abs(r.g - r.g_from_xi14) / l1, r.g / l1);
            a_g4.add(std::abs(r.g - r.g_from_xi4) / l1, r.g / l1);
            a_gr.add(std::abs(r.g - r.g_reordered) / l1, r.g / l1);
            const TauIdentity t = tau_identity(x1, x2, x3, x4);
            a_tau.add(std::abs(t.alternating_sum - t.factored) / q4, t.factored / q4);
            ++omega[to_string(omega_membership(x1, x2, x3, x4, theta).label)];
        }
        const long long n = tuples;
        auto put = [&](const std::string& name, const Acc& acc) {
            o.table.add({name, alpha, n, acc.err, acc.lo, acc.hi});
        };
        put("h3_form_" + to_string(f.kind), a_h3);
        put("h4_product", a_h4);
        put("g_from_xi14", a_g14);
        put("g_from_xi4", a_g4);
        put("g_reordered", a_gr);
        put("tau_identity", a_tau);
        for (const char* label : {"omega", "case1", "case2.1", "case2.2", "case2.3"}) {
            const double frac = static_cast<double>(omega[label]) / static_cast<double>(n);
            o.table.add({std::string("fraction_") + label, alpha, n, 0.0, frac, frac});
        }
        log << "resonance-check alpha " << csv::format(alpha) << ": h3/sum xi^2 in [" << csv::format(a_h3.lo) << ", "
            << csv::format(a_h3.hi) << "]\n";
    }
    return {o};
}

std::vector<Output> cmd_plan(const Values& v, std::ostream& log)
{
    Margins m;
    m.eps = num(v, "eps");
    m.eps_prime = num(v, "eps_prime");
    m.eps_second = num(v, "eps_second");
    m.margin = num(v, "margin");
    m.delta = num(v, "delta");
    const std::string kind = v.at("regime");
    GwpPlan p;
    if (kind == "small-alpha")
        p = choose_N_small_alpha(num(v, "rho"), num(v, "T0"), m);
    else if (kind == "mid-alpha")
        p = choose_N_mid_alpha(num(v, "rho"), num(v, "T0"), num(v, "theta"), m);
    else
        throw ConfigError("regime: expected small-alpha or mid-alpha, got '" + kind + "'");

    Output o{"plan.csv",
             {{"regime", "rho", "T0", "theta", "log2_N", "N", "lambda", "beta", "window", "iterations", "slack", "budget",
               "budget_limit"},
              {}}};
    o.table.add({to_string(p.regime), p.rho, p.T0, p.theta, static_cast<long long>(p.log2_N), p.N, p.lambda, p.beta,
                 p.window, p.iterations, p.slack, p.budget, p.budget_limit});
    for (std::size_t i = 0; i < o.table.header.size(); ++i) {
        std::string name = o.table.header[i];
        name.resize(std::max<std::size_t>(name.size(), 14), ' ');
        log << name << csv::format(o.table.rows[0][i]) << "\n";
    }
    return {o};
}

// ---- command table

const std::vector<KeySpec> data_keys = {
    {"seed", "1", "PRNG seed (xoshiro256**)"},
    {"band", "-1", "highest excited mode index, -1 for n/8"},
    {"envelope", "0", "coefficient envelope exponent: <xi>^-envelope"},
    {"data_s", "0", "Sobolev index in which the data are normalized"},
};

std::vector<KeySpec> with_data(std::vector<KeySpec> keys, const std::string& seed, const std::string& band = "-1",
                               const std::string& envelope = "0")
{
    for (auto k : data_keys) {
        if (k.name == "seed") k.def = seed;
        if (k.name == "band") k.def = band;
        if (k.name == "envelope") k.def = envelope;
        keys.push_back(k);
    }
    return keys;
}

std::vector<Command> commands()
{
    std::vector<Command> c;
    c.push_back({"simulate",
                 "Evolve random data with Strang splitting and record conserved and modified quantities",
                 with_data({{"n", "256", "grid points"},
                            {"L", "32pi", "period (suffix pi allowed)"},
                            {"alpha", "0.25", "dispersion ratio in (0,1)"},
                            {"dt", "1e-3", "time step"},
                            {"T", "1", "final time"},
                            {"stride", "10", "steps between samples"},
                            {"nonlinear", "true", "false gives the free flow"},
                            {"norm_u", "0.1", "norm of u"},
                            {"norm_v", "0.1", "norm of v"},
                            {"N", "16", "I-operator cutoff"},
                            {"rho", "0.5", "I-operator decay"}},
                           "1"),
                 "trajectory.csv columns:\n"
                 "  t       sample time\n"
                 "  mass    ||u||^2/2 + ||v||^2\n"
                 "  energy  ||u_x||^2 + alpha ||v_x||^2 + Re int conj(v) u^2\n"
                 "  E2      ||Iu||^2/2 + ||Iv||^2\n"
                 "  E3      E2 plus the cubic correction (empty for alpha >= 1/2)\n"
                 "  norm_u  ||u||_L2\n"
                 "  norm_v  ||v||_L2\n",
                 cmd_simulate});
    c.push_back({"conserve",
                 "Track mass and energy drift along a Strang trajectory",
                 with_data({{"n", "256", "grid points"},
                            {"L", "32pi", "period (suffix pi allowed)"},
                            {"alpha", "0.25", "dispersion ratio in (0,1)"},
                            {"dt", "1e-3", "time step"},
                            {"T", "1", "final time"},
                            {"stride", "100", "steps between samples"},
                            {"amplitude", "0.1", "L2 norm of each component"}},
                           "7"),
                 "conserve.csv columns:\n"
                 "  t             sample time\n"
                 "  mass          ||u||^2/2 + ||v||^2\n"
                 "  energy        ||u_x||^2 + alpha ||v_x||^2 + Re int conj(v) u^2\n"
                 "  mass_drift    (mass - mass(0)) / |mass(0)|\n"
                 "  energy_drift  (energy - energy(0)) / |energy(0)|\n",
                 cmd_conserve});
    c.push_back({"imethod-sweep",
                 "Measure E3 - E2 and the one-window increments of E2, E3 against the cutoff N",
                 with_data({{"n", "512", "grid points"},
                            {"L", "2pi", "period (suffix pi allowed)"},
                            {"alpha", "0.25", "dispersion ratio in (0,1/2)"},
                            {"rho", "0.5", "I-operator decay"},
                            {"N", "8,16,32,64", "cutoffs, comma separated"},
                            {"dt", "2.5e-6", "time step"},
                            {"delta", "0.02", "window length"},
                            {"nonlinear", "true", "false gives the free flow"},
                            {"norm_u", "1", "norm of u"},
                            {"norm_v", "1", "norm of v"}},
                           "1", "192", "1"),
                 "imethod_sweep.csv columns:\n"
                 "  N             I-operator cutoff\n"
                 "  rho           I-operator decay\n"
                 "  alpha         dispersion ratio\n"
                 "  dt            time step\n"
                 "  n             grid points\n"
                 "  L             period\n"
                 "  e2_increment  |E2(delta) - E2(0)|\n"
                 "  e3_increment  |E3(delta) - E3(0)|\n"
                 "  e3_minus_e2   E3(0) - E2(0)\n"
                 "  fitted_gamma  decay exponent of |E3 - E2| / (||Iu||^2 ||Iv||) in N\n"
                 "  fitted_beta   decay exponent of e3_increment in N\n",
                 cmd_imethod_sweep});
    c.push_back({"certify",
                 "Evaluate the bilinear ratio on the counterexample families",
                 {{"regime", "alpha-half", "alpha-half, alpha-mid, alpha-small or endpoint"},
                  {"alpha", "default", "dispersion ratio (default 0.625 mid, 0.25 small)"},
                  {"s", "-0.25", "Sobolev index"},
                  {"b", "0.5", "modulation index"},
                  {"N", "64,128,256,512,1024", "dyadic frequencies, comma separated"},
                  {"beta", "0", "alpha-half xi width exponent"},
                  {"C", "4", "alpha-small window constant"},
                  {"m", "1000000", "endpoint: largest m"},
                  {"nxi", "96", "convolution grid, xi direction"},
                  {"neta", "96", "convolution grid, eta direction"},
                  {"panels", "64", "quadrature panels per convolution value"},
                  {"set_samples", "32", "samples across each set"}},
                 "certify.csv columns:\n"
                 "  regime    family name\n"
                 "  alpha     dispersion ratio\n"
                 "  s, b      indices of the norms\n"
                 "  N         frequency scale\n"
                 "  xsb_u     X^{s,b} norm of the first set (surface tau = -xi^2)\n"
                 "  xsb_v     X^{s,b} norm of the second set (surface tau = alpha xi^2)\n"
                 "  conv_min  minimum of the set convolution over the third set\n"
                 "  ratio     ||<xi>^s <tau - xi^2>^{b-1} conv|| / (xsb_u xsb_v)\n"
                 "  slope     fitted slope of log ratio against log N\n"
                 "endpoint.csv columns (regime endpoint):\n"
                 "  m         number of dyadic pieces\n"
                 "  ratio     (sum_j a_j + 1) / (sum_j a_j^2 + 1), a_j = 1/(1+j), j < m\n",
                 cmd_certify});
    c.push_back({"resonance-check",
                 "Check the resonance identities on random frequency tuples",
                 {{"alpha", "0.25,0.625", "dispersion ratios, comma separated"},
                  {"tuples", "10000", "random tuples per alpha"},
                  {"scale", "100", "frequencies uniform in [-scale, scale]"},
                  {"theta", "0.25", "Omega(theta) parameter"},
                  {"seed", "1", "PRNG seed (xoshiro256**)"}},
                 "resonance.csv columns:\n"
                 "  check          identity or statistic name\n"
                 "  alpha          dispersion ratio\n"
                 "  tuples         number of tuples\n"
                 "  max_rel_error  worst |lhs - rhs| / scale of the tuple\n"
                 "  min_value      smallest normalized value (h3/sum xi^2, h4/sum xi^2, g/sum|xi|), or the fraction\n"
                 "  max_value      largest normalized value, or the fraction\n",
                 cmd_resonance_check});
    c.push_back({"plan",
                 "Choose N for the global iteration and re-check its budget",
                 {{"regime", "small-alpha", "small-alpha or mid-alpha"},
                  {"rho", "0.5", "data regularity -s"},
                  {"T0", "10", "target time"},
                  {"theta", "0.1", "window exponent mu = N^theta (mid-alpha)"},
                  {"eps", "0.01", "lambda exponent slack"},
                  {"eps_prime", "0.01", "decay exponent loss"},
                  {"eps_second", "0.01", "growth exponent loss"},
                  {"margin", "100", "factor standing for much less than"},
                  {"delta", "1", "local window length (small-alpha)"}},
                 "plan.csv columns:\n"
                 "  regime        small-alpha or mid-alpha\n"
                 "  rho, T0       inputs\n"
                 "  theta         window exponent (0 for small-alpha)\n"
                 "  log2_N, N     chosen cutoff\n"
                 "  lambda        rescaling factor\n"
                 "  beta          decay exponent used\n"
                 "  window        delta or mu\n"
                 "  iterations    ceil(lambda^2 T0 / window)\n"
                 "  slack         exponent left in the defining inequality\n"
                 "  budget        accumulated increment\n"
                 "  budget_limit  what the inequality guarantees\n",
                 cmd_plan});
    return c;
}

std::string compiler_version()
{
#if defined(__clang__)
    return "clang " __clang_version__;
#elif defined(__GNUC__)
    return "gcc " __VERSION__;
#else
    return "unknown";
#endif
}

}  // namespace

int run(int argc, const char* const* argv)
{
    const auto started = std::chrono::steady_clock::now();
    std::vector<Command> cmds = commands();

    CLI::App app{"Quadratic NLS system experiments"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path, out_flag;
    int threads = 0;
    app.add_option("--config", config_path, "key = value config file; sections [common] or [<subcommand>]");
    app.add_option("--out", out_flag, "output directory (default out; QNLS_OUT overrides the default)");
    app.add_option("--threads", threads, "worker threads (default QNLS_THREADS or 1)")->check(CLI::NonNegativeNumber);

    std::string footer = "Every subcommand writes its CSV and manifest.txt into the output directory.\n";
    std::vector<Values> values(cmds.size());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        auto* sub = app.add_subcommand(cmds[i].name, cmds[i].help);
        sub->footer(cmds[i].columns);
        for (const auto& k : cmds[i].keys) {
            values[i][k.name] = k.def;
            sub->add_option("--" + k.name, values[i][k.name], k.help)->default_str(k.def);
        }
        subs.push_back(sub);
        footer += "\n" + cmds[i].columns;
    }
    app.footer(footer);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    std::size_t ci = 0;
    while (!subs[ci]->parsed()) ++ci;
    const Command& cmd = cmds[ci];
    Values& v = values[ci];

    try {
        // flags > [subcommand] section > [common] or top-level keys > defaults
        std::string out_config;
        if (!config_path.empty()) {
            std::set<std::string> all_keys{"out", "threads"};
            for (const auto& c : cmds)
                for (const auto& k : c.keys) all_keys.insert(k.name);
            const std::vector<ConfigEntry> entries = load_config(config_path);
            std::map<std::string, const ConfigEntry*> chosen;
            for (const auto& e : entries) {
                const std::string where = config_path + ":" + std::to_string(e.line) + ": ";
                const bool common = e.section.empty() || e.section == "common";
                const auto own = std::find_if(cmds.begin(), cmds.end(), [&](const Command& c) { return c.name == e.section; });
                if (!common && own == cmds.end()) throw ConfigError(where + "unknown section [" + e.section + "]");
                if (common && !all_keys.count(e.key)) throw ConfigError(where + "unknown key '" + e.key + "'");
                if (!common) {
                    const bool known = std::any_of(own->keys.begin(), own->keys.end(),
                                                   [&](const KeySpec& k) { return k.name == e.key; });
                    if (!known) throw ConfigError(where + "unknown key '" + e.key + "' for " + e.section);
                    if (e.section != cmd.name) continue;
                }
                if (e.key == "out") {
                    out_config = e.value;
                    continue;
                }
                if (e.key == "threads") {
                    if (app.get_option("--threads")->count() == 0) {
                        try {
                            threads = static_cast<int>(parse_integer(e.value, "threads"));
                        } catch (const ConfigError& err) {
                            throw ConfigError(where + err.what());
                        }
                    }
                    continue;
                }
                if (!v.count(e.key)) continue;  // common key used by another subcommand
                // top-level and [common] both count as common scope
                const auto it = chosen.find(e.key);
                if (it != chosen.end() && common && (it->second->section.empty() || it->second->section == "common"))
                    throw ConfigError(where + "duplicate key '" + e.key + "'");
                if (it == chosen.end() || !common) chosen[e.key] = &e;
            }
            for (const auto& [key, e] : chosen)
                if (subs[ci]->get_option("--" + key)->count() == 0) v[key] = e->value;
            // validate now so messages carry the config line
            for (const auto& [key, e] : chosen) {
                if (subs[ci]->get_option("--" + key)->count() != 0) continue;
                const std::string& def =
                    std::find_if(cmd.keys.begin(), cmd.keys.end(), [&](const KeySpec& k) { return k.name == key; })->def;
                try {
                    if (def.find(',') != std::string::npos) parse_list(e->value, key);
                    else if (def == "true" || def == "false") {
                        Values tmp{{key, e->value}};
                        boolean(tmp, key);
                    } else if (key != "regime" && def != "default") parse_number(e->value, key);
                } catch (const ConfigError& err) {
                    throw ConfigError(config_path + ":" + std::to_string(e->line) + ": " + err.what());
                }
            }
        }

        if (threads < 0) throw ConfigError("threads: must be >= 0");
        if (threads > 0) set_thread_count(threads);

        fs::path out_dir = "out";
        if (!out_config.empty()) out_dir = out_config;
        if (const char* env = std::getenv("QNLS_OUT"); env && *env) out_dir = env;
        if (!out_flag.empty()) out_dir = out_flag;
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) throw std::runtime_error("cannot create output directory " + out_dir.string());

        std::ostringstream log;
        const std::vector<Output> outputs = cmd.body(v, log);
        std::cout << log.str();

        std::ostringstream manifest;
        manifest << "schema = " << schema_version << "\n";
        manifest << "subcommand = " << cmd.name << "\n";
        if (!config_path.empty()) manifest << "config_file = " << config_path << "\n";
        manifest << "\n[config]\n";
        for (const auto& [key, val] : v) manifest << key << " = " << val << "\n";
        manifest << "\n[run]\n";
        manifest << "threads = " << thread_count() << "\n";
        manifest << "fft = " << fft::backend_version() << "\n";
        manifest << "compiler = " << compiler_version() << "\n";
        manifest << "\n[outputs]\n";
        for (const auto& o : outputs) {
            const std::string text = csv::render(o.table);
            csv::write_atomic(out_dir / o.file, text);
            manifest << o.file << " = " << o.table.rows.size() << " rows, " << text.size() << " bytes\n";
        }
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        manifest << "\n[timing]\nwall_time_s = " << csv::format(wall) << "\n";
        csv::write_atomic(out_dir / "manifest.txt", manifest.str());
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ContractError& e) {
        std::cerr << "invalid parameter: " << e.what() << "\n";
        return 2;
    } catch (const RegimeError& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace qnls::cli
