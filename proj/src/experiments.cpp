#include "levyfields/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "levyfields/continuation.hpp"
#include "levyfields/errors.hpp"
#include "levyfields/kernel.hpp"
#include "levyfields/lattice.hpp"
#include "levyfields/levy.hpp"
#include "levyfields/quadrature.hpp"
#include "levyfields/reflection.hpp"
#include "levyfields/rng.hpp"
#include "levyfields/schwinger.hpp"
#include "levyfields/tabular.hpp"

namespace levyfields {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

// ---- shared bindings -------------------------------------------------------

KernelSpec bind_kernel(const Config& cfg) {
    KernelSpec k;
    k.alpha = cfg.require_real("kernel.alpha");
    k.m0 = cfg.require_real("kernel.m0");
    k.d = static_cast<int>(cfg.int_or("kernel.d", 1));
    if (!(k.alpha > 0.0 && k.alpha <= 1.0))
        fail("kernel.alpha", "must lie in (0, 1], got " + format_g17(k.alpha));
    if (!(k.m0 > 0.0)) fail("kernel.m0", "must be positive, got " + format_g17(k.m0));
    if (k.d < 1) fail("kernel.d", "must be >= 1, got " + std::to_string(k.d));
    try {
        k.validate();
    } catch (const DomainError& e) {
        fail("kernel", e.what());
    }
    return k;
}

LevyTriple bind_noise(const Config& cfg) {
    if (cfg.sections.count("noise") == 0)
        fail("noise", "section is required by this experiment");
    const double a = cfg.real_or("noise.a", 0.0);
    const double sigma = cfg.real_or("noise.sigma", 0.0);
    std::vector<JumpAtom> atoms;
    if (cfg.has("noise.atoms"))
        for (const auto& [s, w] : cfg.require_pairs("noise.atoms"))
            atoms.push_back(JumpAtom{s, w});
    LevyTriple triple;
    try {
        triple = LevyTriple{a, sigma, JumpMeasure(std::move(atoms))};
        triple.validate();
    } catch (const DomainError& e) {
        fail("noise", e.what());
    }
    if (cfg.bool_or("noise.center", false)) triple = center(triple);
    return triple;
}

LatticeSpec bind_lattice(const Config& cfg, int d) {
    LatticeSpec spec;
    spec.d = d;
    spec.n_per_axis = static_cast<int>(cfg.require_int("lattice.n"));
    spec.delta = cfg.require_real("lattice.delta");
    try {
        spec.validate();
    } catch (const DomainError& e) {
        fail("lattice", e.what());
    }
    return spec;
}

// Radial bump cut to 8 widths; with positive_time set, it also vanishes at
// times <= 0 so the result is a valid half-space test function.
TestFunction bump(const LatticeSpec& spec, const std::vector<double>& center, double width,
                  bool positive_time) {
    LatticeField f(spec);
    const double cutoff_sq = 64.0 * width * width;
    for (std::size_t flat = 0; flat < f.size(); ++flat) {
        const std::vector<double> p = spec.site_point(flat);
        if (positive_time && p[0] <= 0.0) continue;
        double r_sq = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k)
            r_sq += (p[k] - center[k]) * (p[k] - center[k]);
        if (r_sq > cutoff_sq) continue;
        f[flat] = std::exp(-r_sq / (2.0 * width * width));
    }
    return TestFunction{std::move(f), positive_time};
}

std::vector<double> on_time_axis(double t, int d) {
    std::vector<double> x(static_cast<std::size_t>(d), 0.0);
    x[0] = t;
    return x;
}

std::ofstream open_output(const fs::path& dir, const std::string& name,
                          std::vector<std::string>& outputs) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error("cannot open output file '" + (dir / name).string() + "'");
    outputs.push_back(name);
    return out;
}

double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string pass_detail(double value, const std::string& relation, double bound) {
    return format_g17(value) + " " + relation + " " + format_g17(bound);
}

// ---- moments ---------------------------------------------------------------

struct MomentsParams {
    KernelSpec kernel;
    LevyTriple noise;
    LatticeSpec lattice;
    std::vector<int> orders;
    std::int64_t samples = 0;
    std::vector<double> bump_times;
    double bump_width = 0.0;
    double se_tolerance = 0.0;
};

MomentsParams bind_moments(const Config& cfg) {
    MomentsParams p;
    p.kernel = bind_kernel(cfg);
    p.noise = bind_noise(cfg);
    p.lattice = bind_lattice(cfg, p.kernel.d);
    for (std::int64_t n : cfg.require_ints("moments.orders")) {
        if (n < 1 || n > 12)
            fail("moments.orders", "orders must lie in [1, 12], got " + std::to_string(n));
        p.orders.push_back(static_cast<int>(n));
    }
    if (p.orders.empty()) fail("moments.orders", "at least one order required");
    p.samples = cfg.require_int("moments.samples");
    if (p.samples < 100) fail("moments.samples", "need at least 100 samples");
    p.bump_times = cfg.require_reals("moments.bump_times");
    const int max_order = *std::max_element(p.orders.begin(), p.orders.end());
    if (p.bump_times.size() < static_cast<std::size_t>(max_order))
        fail("moments.bump_times", "need at least " + std::to_string(max_order) +
                                       " entries for the largest order");
    p.bump_width = cfg.require_real("moments.bump_width");
    if (!(p.bump_width > 0.0)) fail("moments.bump_width", "must be positive");
    p.se_tolerance = cfg.real_or("moments.se_tolerance", 5.0);
    if (!(p.se_tolerance > 0.0)) fail("moments.se_tolerance", "must be positive");
    return p;
}

RunResult run_moments(const MomentsParams& p, std::uint64_t seed, const fs::path& out_dir) {
    RunResult result;
    std::vector<TestFunction> all_bumps;
    for (double t : p.bump_times)
        all_bumps.push_back(bump(p.lattice, on_time_axis(t, p.kernel.d), p.bump_width, false));

    std::ofstream csv = open_output(out_dir, "moments.csv", result.outputs);
    write_csv_row(csv, {"order", "analytic", "mc_value", "mc_std_error", "z", "n_samples"});
    for (int n : p.orders) {
        const std::vector<TestFunction> phis(all_bumps.begin(), all_bumps.begin() + n);
        const double analytic = schwinger(p.kernel, p.noise, phis);
        const SchwingerEstimate mc = mc_schwinger(p.kernel, p.noise, phis, p.samples,
                                                  RngStream{seed, static_cast<std::uint64_t>(n)});
        const double z = mc.std_error > 0.0 ? (mc.value - analytic) / mc.std_error
                                            : (mc.value == analytic ? 0.0 : INFINITY);
        write_csv_row(csv, {std::to_string(n), format_g17(analytic), format_g17(mc.value),
                            format_g17(mc.std_error), format_g17(z),
                            std::to_string(mc.n_samples)});
        result.checks.push_back({"order-" + std::to_string(n) + " z-score",
                                 std::abs(z) <= p.se_tolerance,
                                 "|z| = " + pass_detail(std::abs(z), "<=", p.se_tolerance) +
                                     " standard errors"});
    }
    return result;
}

// ---- cluster ---------------------------------------------------------------

struct ClusterParams {
    KernelSpec kernel;
    LevyTriple noise;
    LatticeSpec lattice;
    std::vector<double> lambdas;
    double bump_width = 0.0;
    double rate_min = 0.0; // in units of m0
    double rate_max = 0.0;
};

ClusterParams bind_cluster(const Config& cfg) {
    ClusterParams p;
    p.kernel = bind_kernel(cfg);
    p.noise = bind_noise(cfg);
    p.lattice = bind_lattice(cfg, p.kernel.d);
    const double lo = cfg.require_real("cluster.lambda_min");
    const double hi = cfg.require_real("cluster.lambda_max");
    const std::int64_t count = cfg.require_int("cluster.lambda_count");
    if (!(lo > 0.0)) fail("cluster.lambda_min", "must be positive");
    if (!(hi > lo)) fail("cluster.lambda_max", "must exceed lambda_min");
    if (count < 2) fail("cluster.lambda_count", "need at least 2 points to fit a rate");
    for (std::int64_t i = 0; i < count; ++i)
        p.lambdas.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                     static_cast<double>(count - 1));
    p.bump_width = cfg.require_real("cluster.bump_width");
    if (!(p.bump_width > 0.0)) fail("cluster.bump_width", "must be positive");
    p.rate_min = cfg.real_or("cluster.rate_min", 0.9);
    p.rate_max = cfg.real_or("cluster.rate_max", 1.2);
    if (!(p.rate_min > 0.0 && p.rate_max > p.rate_min))
        fail("cluster.rate_min", "need 0 < rate_min < rate_max");
    return p;
}

RunResult run_cluster(const ClusterParams& p, std::uint64_t, const fs::path& out_dir) {
    RunResult result;
    const TestFunction phi =
        bump(p.lattice, on_time_axis(0.0, p.kernel.d), p.bump_width, false);
    std::vector<double> direction(static_cast<std::size_t>(p.kernel.d), 0.0);
    direction[0] = 1.0;
    const auto scan = cluster_scan(p.kernel, p.noise, {phi}, {phi}, direction, p.lambdas);

    std::ofstream csv = open_output(out_dir, "cluster.csv", result.outputs);
    write_cluster_csv(scan, csv);

    std::vector<double> xs, ys;
    for (const auto& [lambda, value] : scan) {
        if (value == 0.0) {
            result.checks.push_back({"decay rate", false,
                                     "connected value is exactly zero at lambda = " +
                                         format_g17(lambda) + "; no rate to fit"});
            return result;
        }
        xs.push_back(lambda);
        ys.push_back(std::log(std::abs(value)));
    }
    const double rate = -least_squares_slope(xs, ys) / p.kernel.m0;
    result.checks.push_back({"decay rate",
                             rate >= p.rate_min && rate <= p.rate_max,
                             "fitted rate " + format_g17(rate) + " m0 in [" +
                                 format_g17(p.rate_min) + ", " + format_g17(p.rate_max) +
                                 "] m0"});
    return result;
}

// ---- rp --------------------------------------------------------------------

struct RpParams {
    KernelSpec kernel;
    LevyTriple noise;
    LatticeSpec lattice;
    int max_order = 0;
    GramMode mode = GramMode::full;
    std::vector<double> bump_times;
    double bump_width = 0.0;
    double eigen_tolerance = 0.0;
};

RpParams bind_rp(const Config& cfg) {
    RpParams p;
    p.kernel = bind_kernel(cfg);
    p.noise = bind_noise(cfg);
    p.lattice = bind_lattice(cfg, p.kernel.d);
    p.max_order = static_cast<int>(cfg.require_int("rp.max_order"));
    if (p.max_order < 1 || p.max_order > 6)
        fail("rp.max_order", "must lie in [1, 6], got " + std::to_string(p.max_order));
    const std::string mode = cfg.string_or("rp.mode", "full");
    if (mode == "full")
        p.mode = GramMode::full;
    else if (mode == "conditional")
        p.mode = GramMode::conditional;
    else
        fail("rp.mode", "must be \"full\" or \"conditional\", got \"" + mode + "\"");
    p.bump_times = cfg.require_reals("rp.bump_times");
    if (p.bump_times.size() < static_cast<std::size_t>(p.max_order))
        fail("rp.bump_times",
             "need at least " + std::to_string(p.max_order) + " entries for max_order");
    for (double t : p.bump_times)
        if (!(t > 0.0))
            fail("rp.bump_times", "times must be strictly positive (half-space support), got " +
                                      format_g17(t));
    p.bump_width = cfg.require_real("rp.bump_width");
    if (!(p.bump_width > 0.0)) fail("rp.bump_width", "must be positive");
    p.eigen_tolerance = cfg.real_or("rp.eigen_tolerance", 1e-8);
    if (!(p.eigen_tolerance > 0.0)) fail("rp.eigen_tolerance", "must be positive");
    return p;
}

RunResult run_rp(const RpParams& p, std::uint64_t, const fs::path& out_dir) {
    RunResult result;
    std::vector<TestFunction> bumps;
    for (double t : p.bump_times)
        bumps.push_back(bump(p.lattice, on_time_axis(t, p.kernel.d), p.bump_width, true));
    std::vector<std::vector<TestFunction>> family;
    for (int k = 1; k <= p.max_order; ++k)
        family.emplace_back(bumps.begin(), bumps.begin() + k);

    const GramReport report = rp_gram(p.kernel, p.noise, family, p.mode);

    std::ofstream csv = open_output(out_dir, "gram.csv", result.outputs);
    write_gram_csv(report, csv);
    std::ofstream js = open_output(out_dir, "gram_summary.json", result.outputs);
    js << gram_summary_json(report) << "\n";

    const auto dim = static_cast<Eigen::Index>(report.order());
    Eigen::MatrixXd m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r)
        for (Eigen::Index c = 0; c < dim; ++c)
            m(r, c) = report.matrix[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    const double scale =
        std::max(std::abs(solver.eigenvalues().minCoeff()),
                 std::abs(solver.eigenvalues().maxCoeff()));
    const double floor = -p.eigen_tolerance * scale;
    result.checks.push_back({"gram spectrum",
                             report.min_eigenvalue >= floor,
                             "min eigenvalue " + pass_detail(report.min_eigenvalue, ">=", floor) +
                                 " (spectral scale " + format_g17(scale) + ")"});
    return result;
}

// ---- rp-search -------------------------------------------------------------

struct RpSearchParams {
    KernelSpec kernel;
    LevyTriple noise;
    RpSearchConfig search;
    std::vector<double> lambda_fractions;
};

RpSearchParams bind_rp_search(const Config& cfg) {
    RpSearchParams p;
    p.kernel = bind_kernel(cfg);
    p.noise = bind_noise(cfg);
    p.search.lattice = bind_lattice(cfg, p.kernel.d);
    const RpSearchConfig defaults;
    p.search.probe_time = cfg.real_or("rp-search.probe_time", defaults.probe_time);
    p.search.pulse_time_a = cfg.real_or("rp-search.pulse_time_a", defaults.pulse_time_a);
    p.search.pulse_time_b = cfg.real_or("rp-search.pulse_time_b", defaults.pulse_time_b);
    p.search.pulse_width = cfg.real_or("rp-search.pulse_width", defaults.pulse_width);
    p.search.spike_widths = cfg.reals_or("rp-search.spike_widths", defaults.spike_widths);
    p.search.exclusion_radius =
        cfg.real_or("rp-search.exclusion_radius", defaults.exclusion_radius);
    p.search.max_power =
        static_cast<int>(cfg.int_or("rp-search.max_power", defaults.max_power));
    p.search.lambda_tol = cfg.real_or("rp-search.lambda_tol", defaults.lambda_tol);
    if (p.search.max_power < 1 || p.search.max_power > 8)
        fail("rp-search.max_power", "must lie in [1, 8]");
    if (!(p.search.lambda_tol > 0.0)) fail("rp-search.lambda_tol", "must be positive");
    p.lambda_fractions =
        cfg.reals_or("rp-search.lambda_fractions", {0.0625, 0.125, 0.25, 0.5});
    for (double f : p.lambda_fractions)
        if (!(f > 0.0 && f < 1.0))
            fail("rp-search.lambda_fractions",
                 "fractions must lie in (0, 1), got " + format_g17(f));
    return p;
}

RunResult run_rp_search(const RpSearchParams& p, std::uint64_t, const fs::path& out_dir) {
    RunResult result;
    ViolationWitness witness;
    try {
        witness = find_rp_violation(p.kernel, p.noise, p.search);
    } catch (const SearchFailed& e) {
        result.checks.push_back({"witness search", false, e.what()});
        return result;
    }

    std::ofstream js = open_output(out_dir, "witness.json", result.outputs);
    js << witness_json(witness) << "\n";

    result.checks.push_back({"witness integral",
                             witness.integral_value < 0.0,
                             "half-space escalation sum " + format_g17(witness.integral_value) +
                                 " < 0 at power n = " + std::to_string(witness.n_power) +
                                 ", coupling threshold " + format_g17(witness.lambda0)});

    std::ofstream csv = open_output(out_dir, "violation.csv", result.outputs);
    write_csv_row(csv, {"lambda_fraction", "lambda", "witness_moment"});
    bool all_negative = true;
    double worst = -INFINITY;
    for (double f : p.lambda_fractions) {
        const double lambda = f * witness.lambda0;
        const double moment = violation_form(p.kernel, p.noise, witness, lambda);
        write_csv_row(csv, {format_g17(f), format_g17(lambda), format_g17(moment)});
        all_negative = all_negative && moment < 0.0;
        worst = std::max(worst, moment);
    }
    result.checks.push_back({"scaled moments negative", all_negative,
                             "max witness moment over fractions " + format_g17(worst) +
                                 " < 0 for every tested coupling below lambda0"});
    return result;
}

// ---- laplace ---------------------------------------------------------------

struct LaplaceParams {
    double m0 = 0.0;
    std::vector<double> alphas;
    std::vector<double> xs;
    double rel_tolerance = 0.0;
};

LaplaceParams bind_laplace(const Config& cfg) {
    LaplaceParams p;
    p.m0 = bind_kernel(cfg).m0;
    p.alphas = cfg.require_reals("laplace.alphas");
    if (p.alphas.empty()) fail("laplace.alphas", "at least one value required");
    for (double a : p.alphas)
        if (!(a > 0.0 && a < 1.0))
            fail("laplace.alphas", "values must lie in (0, 1), got " + format_g17(a));
    p.xs = cfg.require_reals("laplace.xs");
    if (p.xs.empty()) fail("laplace.xs", "at least one value required");
    for (double x : p.xs)
        if (!(x > 0.0)) fail("laplace.xs", "values must be positive, got " + format_g17(x));
    p.rel_tolerance = cfg.real_or("laplace.rel_tolerance", 1e-4);
    if (!(p.rel_tolerance > 0.0)) fail("laplace.rel_tolerance", "must be positive");
    return p;
}

RunResult run_laplace(const LaplaceParams& p, std::uint64_t, const fs::path& out_dir) {
    RunResult result;
    std::ofstream csv = open_output(out_dir, "laplace.csv", result.outputs);
    write_csv_row(csv, {"alpha", "m0", "x", "oscillatory", "damped", "rel_error"});
    double worst = 0.0;
    for (double alpha : p.alphas)
        for (double x : p.xs) {
            const LaplaceIdentity id = laplace_identity_check(alpha, p.m0, x);
            const double rel = std::abs(id.lhs - id.rhs) / std::abs(id.rhs);
            worst = std::max(worst, rel);
            write_csv_row(csv, {format_g17(alpha), format_g17(p.m0), format_g17(x),
                                format_g17(id.lhs), format_g17(id.rhs), format_g17(rel)});
        }
    result.checks.push_back({"transform identity", worst <= p.rel_tolerance,
                             "max relative gap " + pass_detail(worst, "<=", p.rel_tolerance)});
    return result;
}

// ---- kallen-lehmann --------------------------------------------------------

struct MassRouteParams {
    double m0 = 0.0;
    std::vector<double> alphas;
    std::vector<double> xs;
    double rel_tolerance = 0.0;
};

MassRouteParams bind_kallen_lehmann(const Config& cfg) {
    MassRouteParams p;
    const KernelSpec k = bind_kernel(cfg);
    if (k.d != 1) fail("kernel.d", "the Fourier reference route works in d = 1 only");
    p.m0 = k.m0;
    p.alphas = cfg.require_reals("kallen-lehmann.alphas");
    for (double a : p.alphas)
        if (!(a > 0.0 && a < 1.0))
            fail("kallen-lehmann.alphas", "values must lie in (0, 1), got " + format_g17(a));
    if (p.alphas.empty()) fail("kallen-lehmann.alphas", "at least one value required");
    p.xs = cfg.require_reals("kallen-lehmann.xs");
    if (p.xs.empty()) fail("kallen-lehmann.xs", "at least one value required");
    for (double x : p.xs)
        if (!(x > 0.0))
            fail("kallen-lehmann.xs", "values must be positive, got " + format_g17(x));
    p.rel_tolerance = cfg.real_or("kallen-lehmann.rel_tolerance", 1e-4);
    if (!(p.rel_tolerance > 0.0)) fail("kallen-lehmann.rel_tolerance", "must be positive");
    return p;
}

RunResult run_kallen_lehmann(const MassRouteParams& p, std::uint64_t,
                             const fs::path& out_dir) {
    RunResult result;
    std::ofstream csv = open_output(out_dir, "kallen_lehmann.csv", result.outputs);
    write_csv_row(csv, {"alpha", "m0", "x", "mass_route", "fourier_route", "rel_error"});
    double worst = 0.0;
    for (double alpha : p.alphas)
        for (double x : p.xs) {
            const KernelSpec spec{alpha, p.m0, 1};
            const double mass_route = kernel_position_radial(spec, x);
            const double fourier_route = fourier_cosine_integral(
                [&](double k) { return fourier_multiplier_ksq(spec, k * k); }, x);
            const double rel = std::abs(mass_route - fourier_route) /
                               std::max(std::abs(mass_route), std::abs(fourier_route));
            worst = std::max(worst, rel);
            write_csv_row(csv, {format_g17(alpha), format_g17(p.m0), format_g17(x),
                                format_g17(mass_route), format_g17(fourier_route),
                                format_g17(rel)});
        }
    result.checks.push_back({"route agreement", worst <= p.rel_tolerance,
                             "max relative gap " + pass_detail(worst, "<=", p.rel_tolerance)});
    return result;
}

// ---- wightman --------------------------------------------------------------

struct WightmanParams {
    double alpha = 0.0;
    double m0 = 0.0;
    int d = 2;
    double c2 = 0.0;
    double c3 = 0.0;
    std::vector<int> ns;
    GridAxes axes;
    double reduction_tolerance = 0.0;
    std::vector<double> hilbert_alphas;
    std::vector<double> hilbert_ksqs;
    double hilbert_tolerance = 0.0;
    double hilbert_pv_tolerance = 0.0;
    std::vector<double> restriction_xs;
    double restriction_tolerance = 0.0;
};

WightmanParams bind_wightman(const Config& cfg) {
    WightmanParams p;
    const KernelSpec k = bind_kernel(cfg);
    if (!(k.alpha < 0.5))
        fail("kernel.alpha", "the two-point density needs alpha in (0, 1/2), got " +
                                 format_g17(k.alpha));
    if (k.d < 2) fail("kernel.d", "density grids need d >= 2, got " + std::to_string(k.d));
    p.alpha = k.alpha;
    p.m0 = k.m0;
    p.d = k.d;
    p.c2 = cfg.real_or("wightman.c2", 1.0);
    p.c3 = cfg.real_or("wightman.c3", 1.0);
    std::vector<std::int64_t> ns{2, 3};
    if (cfg.has("wightman.ns")) ns = cfg.require_ints("wightman.ns");
    for (std::int64_t n : ns) {
        if (n != 2 && n != 3)
            fail("wightman.ns", "support checks cover n in {2, 3}, got " + std::to_string(n));
        p.ns.push_back(static_cast<int>(n));
    }
    p.axes.k0_min = cfg.real_or("wightman.k0_min", p.axes.k0_min);
    p.axes.k0_max = cfg.real_or("wightman.k0_max", p.axes.k0_max);
    p.axes.k0_steps = static_cast<int>(cfg.int_or("wightman.k0_steps", p.axes.k0_steps));
    p.axes.ks_min = cfg.real_or("wightman.ks_min", p.axes.ks_min);
    p.axes.ks_max = cfg.real_or("wightman.ks_max", p.axes.ks_max);
    p.axes.ks_steps = static_cast<int>(cfg.int_or("wightman.ks_steps", p.axes.ks_steps));
    try {
        p.axes.validate();
    } catch (const DomainError& e) {
        fail("wightman", e.what());
    }
    p.reduction_tolerance = cfg.real_or("wightman.reduction_tolerance", 1e-12);
    p.hilbert_alphas = cfg.reals_or("wightman.hilbert_alphas", {0.1, 0.2, 0.3, 0.4, 0.45});
    for (double a : p.hilbert_alphas)
        if (!(a > 0.0 && a < 1.0))
            fail("wightman.hilbert_alphas", "values must lie in (0, 1), got " + format_g17(a));
    p.hilbert_ksqs = cfg.reals_or("wightman.hilbert_ksqs", {-1.0, 0.0, 0.5, 2.0, 4.0});
    for (double ksq : p.hilbert_ksqs)
        if (std::abs(ksq - p.m0 * p.m0) < 1e-6)
            fail("wightman.hilbert_ksqs",
                 "value sits on the mass shell: " + format_g17(ksq));
    p.hilbert_tolerance = cfg.real_or("wightman.hilbert_tolerance", 1e-6);
    p.hilbert_pv_tolerance = cfg.real_or("wightman.hilbert_pv_tolerance", 1e-4);
    p.restriction_xs = cfg.reals_or("wightman.restriction_xs", {1.0, 2.0});
    for (double x : p.restriction_xs)
        if (!(x > 0.0))
            fail("wightman.restriction_xs", "values must be positive, got " + format_g17(x));
    p.restriction_tolerance = cfg.real_or("wightman.restriction_tolerance", 1e-3);
    return p;
}

// Mass integral of (y - m0^2)^{-alpha} / (y - ksq) over y > m0^2 by direct
// quadrature: ordinary below the shell, symmetric pairing around the pole
// plus an ordinary tail above it.
double hilbert_quadrature(double alpha, double m0, double ksq) {
    const double m0sq = m0 * m0;
    if (ksq < m0sq) {
        const double c = m0sq - ksq;
        const auto f = [=](double u) { return std::pow(u, -alpha) / (u + c); };
        return integrate(f, 0.0, 1.0) + integrate_to_infinity(f, 1.0);
    }
    const double g = ksq - m0sq;
    const double paired = integrate(
        [=](double h) { return (std::pow(g + h, -alpha) - std::pow(g - h, -alpha)) / h; },
        0.0, g);
    const double tail =
        integrate_to_infinity([=](double u) { return std::pow(u, -alpha) / (u - g); },
                              2.0 * g);
    return paired + tail;
}

RunResult run_wightman(const WightmanParams& p, std::uint64_t, const fs::path& out_dir) {
    RunResult result;

    const SpectralGrid grid = make_density_grid(
        [&](const std::vector<double>& k) { return wightman2_density(p.alpha, p.m0, p.c2, k); },
        p.d, p.axes, p.m0);
    std::ofstream grid_csv = open_output(out_dir, "wightman2.csv", result.outputs);
    write_grid_csv(grid, grid_csv);

    for (int n : p.ns) {
        const auto density = [&](const std::vector<std::vector<double>>& ks) {
            return n == 2 ? wightman2_density(p.alpha, p.m0, p.c2, ks[0])
                          : wightman_trunc_density(p.alpha, p.m0, n, p.c3, ks);
        };
        const SupportReport report = spectral_support_check(density, n, p.m0, grid);
        std::ofstream js =
            open_output(out_dir, "support_" + std::to_string(n) + ".json", result.outputs);
        js << support_report_json(report) << "\n";
        result.checks.push_back(
            {"support n=" + std::to_string(n),
             report.max_abs_violation == 0.0 && report.tuples_outside > 0,
             "max density outside the cone " + format_g17(report.max_abs_violation) +
                 " over " + std::to_string(report.tuples_outside) + " outside / " +
                 std::to_string(report.tuples_checked) + " checked tuples (must be 0)"});
    }

    double worst_reduction = 0.0;
    for (int i0 = 0; i0 < p.axes.k0_steps; ++i0)
        for (int is = 0; is < p.axes.ks_steps; ++is) {
            const std::size_t idx = grid.index(i0, is);
            if (grid.near_shell[idx]) continue;
            const std::vector<double> k = grid.momentum(i0, is);
            const double two = wightman2_density(p.alpha, p.m0, p.c2, k);
            const double n_route = wightman_trunc_density(p.alpha, p.m0, 2, p.c2, {k});
            const double scale = std::max(std::abs(two), std::abs(n_route));
            if (scale == 0.0) continue;
            worst_reduction = std::max(worst_reduction, std::abs(n_route - two) / scale);
        }
    result.checks.push_back(
        {"two-point reduction", worst_reduction <= p.reduction_tolerance,
         "max relative gap " + pass_detail(worst_reduction, "<=", p.reduction_tolerance)});

    std::ofstream hil = open_output(out_dir, "hilbert.csv", result.outputs);
    write_csv_row(hil,
                  {"alpha", "k_sq", "closed_form", "quadrature", "rel_error", "principal_value"});
    double worst_ordinary = 0.0;
    double worst_pv = 0.0;
    for (double alpha : p.hilbert_alphas)
        for (double ksq : p.hilbert_ksqs) {
            const bool pv = ksq > p.m0 * p.m0;
            const double closed = hilbert_rho_transform(alpha, p.m0, ksq);
            const double quad = hilbert_quadrature(alpha, p.m0, ksq);
            const double rel =
                std::abs(closed - quad) / std::max(std::abs(closed), std::abs(quad));
            (pv ? worst_pv : worst_ordinary) = std::max(pv ? worst_pv : worst_ordinary, rel);
            write_csv_row(hil, {format_g17(alpha), format_g17(ksq), format_g17(closed),
                                format_g17(quad), format_g17(rel), pv ? "1" : "0"});
        }
    result.checks.push_back(
        {"mass transform (ordinary)", worst_ordinary <= p.hilbert_tolerance,
         "max relative gap " + pass_detail(worst_ordinary, "<=", p.hilbert_tolerance)});
    result.checks.push_back(
        {"mass transform (principal value)", worst_pv <= p.hilbert_pv_tolerance,
         "max relative gap " + pass_detail(worst_pv, "<=", p.hilbert_pv_tolerance)});

    const auto restriction =
        euclidean_restriction_check(p.alpha, p.m0, p.c2, p.restriction_xs);
    std::ofstream res = open_output(out_dir, "restriction.csv", result.outputs);
    write_csv_row(res, {"x", "s_direct", "s_laplace", "rel_error"});
    double worst_restriction = 0.0;
    for (const RestrictionPoint& pt : restriction) {
        const double scale = std::max(std::abs(pt.s_direct), std::abs(pt.s_laplace));
        const double rel = scale == 0.0 ? 0.0 : std::abs(pt.s_direct - pt.s_laplace) / scale;
        worst_restriction = std::max(worst_restriction, rel);
        write_csv_row(res, {format_g17(pt.x), format_g17(pt.s_direct),
                            format_g17(pt.s_laplace), format_g17(rel)});
    }
    result.checks.push_back(
        {"euclidean restriction", worst_restriction <= p.restriction_tolerance,
         "max relative gap " + pass_detail(worst_restriction, "<=", p.restriction_tolerance)});

    return result;
}

// ---- gaussian-limit --------------------------------------------------------

struct GaussianLimitParams {
    std::vector<int> ns;
    std::int64_t draws = 0;
    double sigma = 0.0;
    double cell_volume = 0.0;
    double slope_tolerance = 0.0;
    double c4_tolerance = 0.0;
};

GaussianLimitParams bind_gaussian_limit(const Config& cfg) {
    GaussianLimitParams p;
    for (std::int64_t n : cfg.require_ints("gaussian-limit.ns")) {
        if (n < 1) fail("gaussian-limit.ns", "entries must be >= 1");
        p.ns.push_back(static_cast<int>(n));
    }
    if (p.ns.size() < 2) fail("gaussian-limit.ns", "need at least 2 entries to fit a slope");
    p.draws = cfg.require_int("gaussian-limit.draws");
    if (p.draws < 1000) fail("gaussian-limit.draws", "need at least 1000 draws");
    p.sigma = cfg.real_or("gaussian-limit.sigma", 1.0);
    if (!(p.sigma > 0.0)) fail("gaussian-limit.sigma", "must be positive");
    p.cell_volume = cfg.real_or("gaussian-limit.cell_volume", 1.0);
    if (!(p.cell_volume > 0.0)) fail("gaussian-limit.cell_volume", "must be positive");
    p.slope_tolerance = cfg.real_or("gaussian-limit.slope_tolerance", 0.3);
    if (!(p.slope_tolerance > 0.0)) fail("gaussian-limit.slope_tolerance", "must be positive");
    p.c4_tolerance = cfg.real_or("gaussian-limit.c4_tolerance", 1e-12);
    return p;
}

RunResult run_gaussian_limit(const GaussianLimitParams& p, std::uint64_t seed,
                             const fs::path& out_dir) {
    RunResult result;
    std::ofstream csv = open_output(out_dir, "gaussian_limit.csv", result.outputs);
    write_csv_row(csv, {"n", "c4_analytic", "c4_expected", "excess_kurtosis", "draws"});

    std::vector<double> log_ns, log_kurtosis;
    bool c4_ok = true;
    double worst_c4 = 0.0;
    for (std::size_t ni = 0; ni < p.ns.size(); ++ni) {
        const int n = p.ns[ni];
        const LevyTriple triple = gaussian_limit_triple(n, p.sigma);
        const double c4 = cumulant(triple, 4);
        const double expected = p.sigma * p.sigma / (static_cast<double>(n) * n);
        const double c4_gap = std::abs(c4 / expected - 1.0);
        worst_c4 = std::max(worst_c4, c4_gap);
        c4_ok = c4_ok && c4_gap <= p.c4_tolerance;

        // Central moments from power sums; long double absorbs the
        // cancellation in the mean subtraction.
        long double s1 = 0.0L, s2 = 0.0L, s3 = 0.0L, s4 = 0.0L;
        const std::uint64_t base = static_cast<std::uint64_t>(ni) << 32;
        for (std::int64_t i = 0; i < p.draws; ++i) {
            const long double x = sample_site(
                triple, p.cell_volume, RngStream{seed, base + static_cast<std::uint64_t>(i)});
            s1 += x;
            s2 += x * x;
            s3 += x * x * x;
            s4 += x * x * x * x;
        }
        const long double inv = 1.0L / static_cast<long double>(p.draws);
        const long double mu = s1 * inv;
        const long double m2 = s2 * inv - mu * mu;
        const long double m4 =
            s4 * inv - 4.0L * mu * (s3 * inv) + 6.0L * mu * mu * (s2 * inv) - 3.0L * mu * mu * mu * mu;
        const double kurtosis = static_cast<double>(m4 / (m2 * m2) - 3.0L);

        write_csv_row(csv, {std::to_string(n), format_g17(c4), format_g17(expected),
                            format_g17(kurtosis), std::to_string(p.draws)});
        if (kurtosis > 0.0) {
            log_ns.push_back(std::log(static_cast<double>(n)));
            log_kurtosis.push_back(std::log(kurtosis));
        }
    }
    result.checks.push_back({"quartic cumulant scaling", c4_ok,
                             "max |c4 n^2 / sigma^2 - 1| = " +
                                 pass_detail(worst_c4, "<=", p.c4_tolerance)});

    if (log_ns.size() == p.ns.size()) {
        const double slope = least_squares_slope(log_ns, log_kurtosis);
        result.checks.push_back(
            {"kurtosis slope", std::abs(slope + 2.0) <= p.slope_tolerance,
             "log-log slope " + format_g17(slope) + " within " +
                 format_g17(p.slope_tolerance) + " of -2"});
    } else {
        result.checks.push_back({"kurtosis slope", false,
                                 "sampled excess kurtosis non-positive for some n; "
                                 "cannot fit a log-log slope"});
    }
    return result;
}

} // namespace

// ---- registry --------------------------------------------------------------

const std::vector<ExperimentInfo>& experiment_catalog() {
    static const std::vector<ExperimentInfo> catalog{
        {"moments",
         "Analytic correlation moments (cumulant partition sums) against Monte Carlo",
         "[moments] orders, samples, bump_times, bump_width, se_tolerance; "
         "needs [kernel] [noise] [lattice] seed"},
        {"cluster", "Connected two-point decay as one argument translates away",
         "[cluster] lambda_min, lambda_max, lambda_count, bump_width, rate_min, rate_max; "
         "needs [kernel] [noise] [lattice]"},
        {"rp", "Pairing Gram spectrum for a family of argument tuples",
         "[rp] max_order, mode, bump_times, bump_width, eigen_tolerance; "
         "needs [kernel] [noise] [lattice]"},
        {"rp-search",
         "Constructive positivity violation: witness functions and coupling threshold",
         "[rp-search] probe_time, pulse_time_a/b, pulse_width, spike_widths, "
         "exclusion_radius, max_power, lambda_tol, lambda_fractions; "
         "needs [kernel] [noise] [lattice]"},
        {"laplace", "Oscillatory vs damped route to the position kernel",
         "[laplace] alphas, xs, rel_tolerance; needs kernel.m0"},
        {"kallen-lehmann",
         "Mass-superposition route vs direct Fourier quadrature (d = 1)",
         "[kallen-lehmann] alphas, xs, rel_tolerance; needs kernel.m0, kernel.d = 1"},
        {"wightman",
         "Relativistic spectral densities: cone support, two-point reduction, "
         "mass transform, Euclidean restriction",
         "[wightman] c2, c3, ns, k0_min/max/steps, ks_min/max/steps, "
         "reduction_tolerance, hilbert_alphas, hilbert_ksqs, hilbert_tolerance, "
         "hilbert_pv_tolerance, restriction_xs, restriction_tolerance; "
         "needs kernel.alpha < 1/2, kernel.d >= 2"},
        {"gaussian-limit",
         "Small-jump scaling: quartic cumulant decay and sampled excess kurtosis",
         "[gaussian-limit] ns, draws, sigma, cell_volume, slope_tolerance, c4_tolerance; "
         "needs seed"},
    };
    return catalog;
}

bool RunResult::passed() const {
    for (const CheckOutcome& c : checks)
        if (!c.passed) return false;
    return true;
}

namespace {

std::string bound_experiment(const Config& cfg) {
    const std::string& name = cfg.require_string("experiment");
    for (const ExperimentInfo& info : experiment_catalog())
        if (info.name == name) return name;
    std::string names;
    for (const ExperimentInfo& info : experiment_catalog())
        names += (names.empty() ? "" : ", ") + info.name;
    fail("experiment", "unknown experiment '" + name + "'; expected one of: " + names);
}

void bind_seed(const Config& cfg) {
    const std::int64_t seed = cfg.require_int("seed");
    if (seed < 0) fail("seed", "must be non-negative");
}

} // namespace

void validate_experiment_config(const Config& cfg) {
    const std::string name = bound_experiment(cfg);
    bind_seed(cfg);
    if (name == "moments")
        bind_moments(cfg);
    else if (name == "cluster")
        bind_cluster(cfg);
    else if (name == "rp")
        bind_rp(cfg);
    else if (name == "rp-search")
        bind_rp_search(cfg);
    else if (name == "laplace")
        bind_laplace(cfg);
    else if (name == "kallen-lehmann")
        bind_kallen_lehmann(cfg);
    else if (name == "wightman")
        bind_wightman(cfg);
    else
        bind_gaussian_limit(cfg);
}

RunResult run_experiment(const Config& cfg, std::uint64_t seed,
                         const std::filesystem::path& out_dir) {
    const std::string name = bound_experiment(cfg);
    bind_seed(cfg);
    if (name == "moments") return run_moments(bind_moments(cfg), seed, out_dir);
    if (name == "cluster") return run_cluster(bind_cluster(cfg), seed, out_dir);
    if (name == "rp") return run_rp(bind_rp(cfg), seed, out_dir);
    if (name == "rp-search") return run_rp_search(bind_rp_search(cfg), seed, out_dir);
    if (name == "laplace") return run_laplace(bind_laplace(cfg), seed, out_dir);
    if (name == "kallen-lehmann")
        return run_kallen_lehmann(bind_kallen_lehmann(cfg), seed, out_dir);
    if (name == "wightman") return run_wightman(bind_wightman(cfg), seed, out_dir);
    return run_gaussian_limit(bind_gaussian_limit(cfg), seed, out_dir);
}

} // namespace levyfields
