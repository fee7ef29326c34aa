#include "levyfields/reflection.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "levyfields/errors.hpp"
#include "levyfields/parallel.hpp"
#include "levyfields/partitions.hpp"
#include "levyfields/tabular.hpp"

namespace levyfields {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

TestFunction reflect_time(const TestFunction& phi) {
    return TestFunction{levyfields::reflect_time(phi.field), false};
}

double half_space_sum(const LatticeField& f) {
    const LatticeSpec& spec = f.spec;
    const int n = spec.n_per_axis;
    const std::size_t time_stride = spec.site_count() / static_cast<std::size_t>(n);
    const double sum = deterministic_sum(f.size(), [&](std::size_t flat) {
        const int i0 = static_cast<int>(flat / time_stride);
        if (i0 == 0 || i0 == n / 2) return 0.5 * f[flat];
        return spec.signed_index(i0) > 0 ? f[flat] : 0.0;
    });
    return spec.cell_volume() * sum;
}

LatticeField q_fn(const KernelSpec& kspec, const TestFunction& phi) {
    if (!phi.half_space_positive)
        throw SupportError("q_fn: argument must be flagged as positive-time");
    phi.validate();
    const LatticeField mirrored = levyfields::reflect_time(phi.field);
    const LatticeField conv_mirrored = convolve(kspec, mirrored);
    const LatticeField conv = convolve(kspec, phi.field);
    const LatticeField q = multiply(conv_mirrored, conv);

    // Cross-check through the even/odd split of phi: with phi supported at
    // positive time, the even half is (phi + theta phi)/2 and the odd half
    // (phi - theta phi)/2, and q must equal the difference of the squared
    // convolutions of the two halves.
    const LatticeField conv_even = scale(add(conv, conv_mirrored), 0.5);
    const LatticeField conv_odd = scale(subtract(conv, conv_mirrored), 0.5);
    const LatticeField split =
        subtract(multiply(conv_even, conv_even), multiply(conv_odd, conv_odd));
    const double tol = 1e-10 * max_abs(q);
    const double diff = max_abs(subtract(q, split));
    if (diff > tol)
        throw Error("q_fn: product and difference-of-squares routes disagree by " + fmt(diff));
    return q;
}

namespace {

// ---- reflection-symmetric pairing quadrature ------------------------------
//
// The pairing sums behind the Gram matrices run over the window minus the
// wrap plane (storage time index n/2): that plane is the one slab of the
// grid whose mirror image falls outside the window, so dropping it makes
// the summation domain invariant under time reflection and the Gram
// symmetry exact to rounding.  The omitted slab only carries far-field
// convolution tails, several orders below every tolerance used here.

double pairing_block_sum(const LevyTriple& triple, const std::vector<LatticeField>& conv,
                         const std::vector<int>& block) {
    const double c = cumulant(triple, static_cast<int>(block.size()));
    if (c == 0.0) return 0.0;
    const LatticeField& first = conv[static_cast<std::size_t>(block.front() - 1)];
    const LatticeSpec& spec = first.spec;
    const int n = spec.n_per_axis;
    const std::size_t time_stride = spec.site_count() / static_cast<std::size_t>(n);
    const double sum = deterministic_sum(first.size(), [&](std::size_t i) {
        if (static_cast<int>(i / time_stride) == n / 2) return 0.0;
        double prod = first[i];
        for (std::size_t j = 1; j < block.size(); ++j)
            prod *= conv[static_cast<std::size_t>(block[j] - 1)][i];
        return prod;
    });
    return c * spec.cell_volume() * sum;
}

// Full or connected pairing moment of the argument list on the symmetric
// domain; args must be non-empty and pre-validated.
double pairing_moment(const KernelSpec& kspec, const LevyTriple& triple,
                      const std::vector<TestFunction>& args, bool connected) {
    std::vector<LatticeField> conv;
    conv.reserve(args.size());
    for (const TestFunction& phi : args) conv.push_back(convolve(kspec, phi.field));
    if (connected) {
        std::vector<int> all(args.size());
        for (std::size_t j = 0; j < all.size(); ++j) all[j] = static_cast<int>(j) + 1;
        return pairing_block_sum(triple, conv, all);
    }
    partitions::BlockCache cache(
        [&](const std::vector<int>& block) { return pairing_block_sum(triple, conv, block); });
    return partitions::moments_from_truncated(
        [&](const std::vector<int>& block) { return cache(block); },
        static_cast<int>(args.size()));
}

} // namespace

GramReport rp_gram(const KernelSpec& kspec, const LevyTriple& triple,
                   const std::vector<std::vector<TestFunction>>& family, GramMode mode) {
    kspec.validate();
    triple.validate();

    const TestFunction* first = nullptr;
    for (const std::vector<TestFunction>& tuple : family) {
        if (mode == GramMode::conditional && tuple.empty())
            throw SizeError("rp_gram: conditional mode requires tuples of order >= 1");
        for (const TestFunction& phi : tuple) {
            if (!phi.half_space_positive)
                throw SupportError("rp_gram: every tuple entry must be flagged positive-time");
            phi.validate();
            if (first == nullptr) {
                first = &phi;
                if (phi.field.spec.d != kspec.d)
                    throw LatticeMismatch("rp_gram: kernel and lattice dimensions differ");
            }
            require_same_spec(phi.field, first->field, "rp_gram");
        }
    }
    if (family.empty() && mode == GramMode::conditional)
        throw SizeError("rp_gram: conditional mode needs a non-empty family");

    // Tuple slots, with the constant slot prepended in full mode.
    std::vector<std::vector<TestFunction>> slots;
    if (mode == GramMode::full) slots.emplace_back();
    slots.insert(slots.end(), family.begin(), family.end());
    const std::size_t rows = slots.size();
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < rows; ++c)
            if (slots[r].size() + slots[c].size() >
                static_cast<std::size_t>(partitions::kMaxGroundSet))
                throw SizeError("rp_gram: pairing order exceeds the partition cap of 12");

    std::vector<std::vector<TestFunction>> mirrored(rows);
    for (std::size_t r = 0; r < rows; ++r)
        for (const TestFunction& phi : slots[r]) mirrored[r].push_back(reflect_time(phi));

    std::vector<std::vector<double>> matrix(rows, std::vector<double>(rows, 0.0));
    parallel_for(rows * rows, [&](std::size_t e) {
        const std::size_t r = e / rows;
        const std::size_t c = e % rows;
        std::vector<TestFunction> args = mirrored[r];
        args.insert(args.end(), slots[c].begin(), slots[c].end());
        matrix[r][c] = args.empty()
                           ? 1.0 // zeroth moment
                           : pairing_moment(kspec, triple, args, mode == GramMode::conditional);
    });

    double scale_ref = 1.0;
    double asym = 0.0;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < rows; ++c) {
            scale_ref = std::max(scale_ref, std::abs(matrix[r][c]));
            asym = std::max(asym, std::abs(matrix[r][c] - matrix[c][r]));
        }
    if (asym > 1e-12 * scale_ref)
        throw Error("rp_gram: matrix asymmetry " + fmt(asym) + " exceeds tolerance");

    Eigen::MatrixXd sym(rows, rows);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < rows; ++c)
            sym(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                0.5 * (matrix[r][c] + matrix[c][r]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success)
        throw Error("rp_gram: eigenvalue computation failed");

    GramReport report;
    report.matrix = std::move(matrix);
    report.min_eigenvalue = solver.eigenvalues().minCoeff();
    report.family = family;
    report.mode = mode;
    return report;
}

namespace {

// exp(-r^2 / 2 width^2) around the center, cut to zero beyond 8 widths and
// (always) at times <= 0 so the result is a valid positive-time function.
LatticeField positive_time_bump(const LatticeSpec& spec, const std::vector<double>& center,
                                double width) {
    LatticeField out(spec);
    const double cutoff_sq = 64.0 * width * width;
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        const std::vector<double> p = spec.site_point(flat);
        if (p[0] <= 0.0) continue;
        double r_sq = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            const double dx = p[k] - center[k];
            r_sq += dx * dx;
        }
        if (r_sq > cutoff_sq) continue;
        out[flat] = std::exp(-r_sq / (2.0 * width * width));
    }
    return out;
}

double distance_sq(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return s;
}

double int_pow(double v, int e) {
    double out = 1.0;
    for (int i = 0; i < e; ++i) out *= v;
    return out;
}

// ---- witness moment as a polynomial in the coupling -----------------------
//
// The witness tuple theta(phi1^{2n} phi2) (x) phi1^{2n} phi2 involves only
// four distinct fields, so its full moment is the mixed moment
// E[U1^{2n} U2 U3^{2n} U4] of four jointly distributed linear functionals.
// Their joint cumulants are cumulant(order) times a lattice sum of products
// of powers of the four convolutions, and scaling the noise law by the
// coupling scales every cumulant linearly.  The full moment then follows
// from the recursion (differentiating M = exp(K) once in the first slot)
//
//   m_alpha = sum_{gamma <= alpha - e} C(alpha - e, gamma)
//             kappa_{gamma + e} m_{alpha - e - gamma},
//
// which stays exact at orders far beyond the set-partition cap.
class WitnessMoment {
public:
    WitnessMoment(const KernelSpec& kspec, const LevyTriple& triple, const TestFunction& phi1,
                  const TestFunction& phi2, int n_power)
        : cap_{2 * n_power, 1, 2 * n_power, 1} {
        const std::array<LatticeField, 4> conv = {
            convolve(kspec, levyfields::reflect_time(phi1.field)),
            convolve(kspec, levyfields::reflect_time(phi2.field)),
            convolve(kspec, phi1.field),
            convolve(kspec, phi2.field),
        };
        const std::size_t sites = conv[0].size();
        const double volume = conv[0].spec.cell_volume();

        kappa_.assign(slots(), 0.0);
        for (int i = 0; i <= cap_[0]; ++i)
            for (int j = 0; j <= cap_[1]; ++j)
                for (int k = 0; k <= cap_[2]; ++k)
                    for (int l = 0; l <= cap_[3]; ++l) {
                        const int order = i + j + k + l;
                        if (order < 1) continue;
                        const double c = cumulant(triple, order);
                        if (c == 0.0) continue;
                        const double sum = deterministic_sum(sites, [&](std::size_t s) {
                            return int_pow(conv[0][s], i) * int_pow(conv[1][s], j) *
                                   int_pow(conv[2][s], k) * int_pow(conv[3][s], l);
                        });
                        kappa_[index(i, j, k, l)] = c * volume * sum;
                    }
    }

    // Full moment of the tuple with every cumulant scaled by the coupling.
    double operator()(double coupling) const {
        std::vector<double> m(slots(), 0.0);
        m[0] = 1.0;
        std::array<int, 4> a{};
        for (a[0] = 0; a[0] <= cap_[0]; ++a[0])
            for (a[1] = 0; a[1] <= cap_[1]; ++a[1])
                for (a[2] = 0; a[2] <= cap_[2]; ++a[2])
                    for (a[3] = 0; a[3] <= cap_[3]; ++a[3]) {
                        int axis = -1;
                        for (int t = 0; t < 4; ++t)
                            if (a[t] > 0) {
                                axis = t;
                                break;
                            }
                        if (axis < 0) continue; // empty index: m = 1
                        std::array<int, 4> rest = a;
                        rest[static_cast<std::size_t>(axis)] -= 1;
                        double total = 0.0;
                        std::array<int, 4> g{};
                        for (g[0] = 0; g[0] <= rest[0]; ++g[0])
                            for (g[1] = 0; g[1] <= rest[1]; ++g[1])
                                for (g[2] = 0; g[2] <= rest[2]; ++g[2])
                                    for (g[3] = 0; g[3] <= rest[3]; ++g[3]) {
                                        std::array<int, 4> ke = g;
                                        ke[static_cast<std::size_t>(axis)] += 1;
                                        const double kappa =
                                            kappa_[index(ke[0], ke[1], ke[2], ke[3])];
                                        if (kappa == 0.0) continue;
                                        double ways = 1.0;
                                        for (int t = 0; t < 4; ++t)
                                            ways *= binom(rest[static_cast<std::size_t>(t)],
                                                          g[static_cast<std::size_t>(t)]);
                                        total += ways * coupling * kappa *
                                                 m[index(rest[0] - g[0], rest[1] - g[1],
                                                         rest[2] - g[2], rest[3] - g[3])];
                                    }
                        m[index(a[0], a[1], a[2], a[3])] = total;
                    }
        return m[index(cap_[0], cap_[1], cap_[2], cap_[3])];
    }

private:
    std::size_t slots() const {
        return static_cast<std::size_t>((cap_[0] + 1) * (cap_[1] + 1) * (cap_[2] + 1) *
                                        (cap_[3] + 1));
    }
    std::size_t index(int i, int j, int k, int l) const {
        return static_cast<std::size_t>(((i * (cap_[1] + 1) + j) * (cap_[2] + 1) + k) *
                                            (cap_[3] + 1) +
                                        l);
    }
    static double binom(int n, int k) {
        double out = 1.0;
        for (int t = 1; t <= k; ++t) out *= static_cast<double>(n - k + t) / t;
        return out;
    }

    std::array<int, 4> cap_;
    std::vector<double> kappa_;
};

// Largest coupling at which the witness moment is still negative: bracket
// the sign change from coupling 1 by doubling or halving, then bisect to
// the configured absolute tolerance.
double bisect_coupling_threshold(const WitnessMoment& p, double tol) {
    double lo, hi;
    if (p(1.0) < 0.0) {
        lo = 1.0;
        hi = 2.0;
        int grow = 0;
        while (p(hi) < 0.0) {
            lo = hi;
            hi *= 2.0;
            if (++grow > 60)
                throw SearchFailed("coupling threshold: witness form still negative at lambda = " +
                                   fmt(lo));
        }
    } else {
        hi = 1.0;
        lo = 0.5;
        int shrink = 0;
        while (p(lo) >= 0.0) {
            hi = lo;
            lo *= 0.5;
            if (++shrink > 60)
                throw SearchFailed(
                    "coupling threshold: witness form nonnegative down to lambda = " + fmt(hi));
        }
    }
    int steps = 0;
    while (hi - lo > tol && ++steps <= 200) {
        const double mid = 0.5 * (lo + hi);
        (p(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

void validate_search_config(const KernelSpec& kspec, const RpSearchConfig& config) {
    config.lattice.validate();
    if (config.lattice.d != kspec.d)
        throw LatticeMismatch("find_rp_violation: kernel and lattice dimensions differ");
    const double half_span = 0.5 * config.lattice.side_length();
    for (double t : {config.probe_time, config.pulse_time_a, config.pulse_time_b})
        if (!(t > 0.0 && t < half_span))
            throw DomainError("find_rp_violation: probe and pulse times must lie in (0, L/2)");
    if (config.pulse_time_a == config.pulse_time_b)
        throw DomainError("find_rp_violation: the two pulse times must differ");
    if (!(config.pulse_width > 0.0))
        throw DomainError("find_rp_violation: pulse_width must be > 0");
    if (config.spike_widths.empty())
        throw DomainError("find_rp_violation: spike_widths must be non-empty");
    for (double w : config.spike_widths)
        if (!(w > 0.0)) throw DomainError("find_rp_violation: spike widths must be > 0");
    if (!(config.exclusion_radius > 0.0))
        throw DomainError("find_rp_violation: exclusion_radius must be > 0");
    if (config.max_power < 1) throw DomainError("find_rp_violation: max_power must be >= 1");
    if (!(config.lambda_tol > 0.0))
        throw DomainError("find_rp_violation: lambda_tol must be > 0");
}

} // namespace

ViolationWitness find_rp_violation(const KernelSpec& kspec, const LevyTriple& triple,
                                   const RpSearchConfig& config) {
    kspec.validate();
    triple.validate();
    validate_search_config(kspec, config);
    if (triple.jumps.atoms().empty())
        throw SearchFailed("find_rp_violation: the law is Gaussian, so every cumulant of order "
                           "4n+2 vanishes and no reflection-positivity violation exists");

    const LatticeSpec& spec = config.lattice;
    const std::size_t dim = static_cast<std::size_t>(spec.d);

    // Probe site x = (probe_time, 0) and its mirror, snapped to the grid.
    const int time_steps = static_cast<int>(std::lround(config.probe_time / spec.delta));
    if (time_steps < 1 || time_steps >= spec.n_per_axis / 2)
        throw DomainError("find_rp_violation: probe_time does not round to an interior "
                          "positive-time site");
    std::vector<int> idx(dim, 0);
    idx[0] = time_steps;
    const std::size_t at_probe = spec.encode(idx.data());
    idx[0] = spec.n_per_axis - time_steps;
    const std::size_t at_mirror = spec.encode(idx.data());
    const std::vector<double> probe_point = spec.site_point(at_probe);
    const std::vector<double> mirror_point = spec.site_point(at_mirror);

    // phi2: cancel the time-even convolution at the probe point with two
    // pulses, leaving a time-odd remainder whose square makes q negative.
    std::vector<double> center_a(dim, 0.0), center_b(dim, 0.0);
    center_a[0] = config.pulse_time_a;
    center_b[0] = config.pulse_time_b;
    const LatticeField pulse_a = positive_time_bump(spec, center_a, config.pulse_width);
    const LatticeField pulse_b = positive_time_bump(spec, center_b, config.pulse_width);
    const LatticeField conv_a = convolve(kspec, pulse_a);
    const LatticeField conv_b = convolve(kspec, pulse_b);
    const double even_a = conv_a[at_probe] + conv_a[at_mirror];
    const double even_b = conv_b[at_probe] + conv_b[at_mirror];
    if (std::abs(even_b) < 1e-300)
        throw SearchFailed("find_rp_violation: second pulse has no even response at the probe "
                           "point; move pulse_time_b");
    const double coefficient = -even_a / even_b;
    const TestFunction phi2{add(pulse_a, scale(pulse_b, coefficient)), true};
    phi2.validate();

    const LatticeField q2 = q_fn(kspec, phi2);
    const double q2_probe = q2[at_probe];
    if (!(q2_probe < 0.0))
        throw SearchFailed("find_rp_violation: q(phi2) is " + fmt(q2_probe) +
                           " at the probe point, expected negative; the odd response "
                           "degenerated, adjust the pulse times");

    const double exclusion_sq = config.exclusion_radius * config.exclusion_radius;
    std::string diagnostics;
    for (double width : config.spike_widths) {
        // Mass-one spike at the probe point and its quadratic form.
        LatticeField spike = positive_time_bump(spec, probe_point, width);
        const double mass = lattice_sum(spike);
        if (!(mass > 0.0)) continue;
        spike = scale(spike, 1.0 / mass);
        const LatticeField q_spike = q_fn(kspec, TestFunction{spike, true});

        // Off-peak bound: the largest |q| outside the exclusion balls around
        // the probe point and its mirror.
        double off_peak = 0.0;
        for (std::size_t flat = 0; flat < q_spike.size(); ++flat) {
            const std::vector<double> p = spec.site_point(flat);
            if (distance_sq(p, probe_point) <= exclusion_sq ||
                distance_sq(p, mirror_point) <= exclusion_sq)
                continue;
            off_peak = std::max(off_peak, std::abs(q_spike[flat]));
        }
        if (!(off_peak > 0.0)) continue;

        const LatticeField q1 = scale(q_spike, 1.0 / off_peak);
        const TestFunction phi1{scale(spike, 1.0 / std::sqrt(off_peak)), true};
        const double peak_ratio = q1[at_probe];

        for (int n = 1; n <= config.max_power; ++n) {
            LatticeField weighted(spec);
            for (std::size_t flat = 0; flat < weighted.size(); ++flat)
                weighted[flat] = int_pow(q1[flat], 2 * n) * q2[flat];
            const double integral = half_space_sum(weighted);
            if (!(integral < 0.0)) continue;

            const WitnessMoment moment(kspec, triple, phi1, phi2, n);
            ViolationWitness witness;
            witness.phi1 = phi1;
            witness.phi2 = phi2;
            witness.n_power = n;
            witness.integral_value = integral;
            witness.lambda0 = bisect_coupling_threshold(moment, config.lambda_tol);
            witness.probe_time = probe_point[0];
            witness.phi1_width = width;
            witness.phi2_coefficient = coefficient;
            return witness;
        }
        diagnostics += " [width " + fmt(width) + ": peak ratio " + fmt(peak_ratio) +
                       ", no negative half-space sum up to n = " +
                       std::to_string(config.max_power) + "]";
    }
    throw SearchFailed("find_rp_violation: no witness within the parameter budget;" +
                       (diagnostics.empty() ? std::string(" no usable spike width") : diagnostics));
}

double violation_form(const KernelSpec& kspec, const LevyTriple& triple,
                      const ViolationWitness& witness, double coupling) {
    kspec.validate();
    triple.validate();
    if (witness.n_power < 1)
        throw DomainError("violation_form: witness power must be >= 1");
    if (!(coupling > 0.0)) throw DomainError("violation_form: coupling must be > 0");
    witness.phi1.validate();
    witness.phi2.validate();
    require_same_spec(witness.phi1.field, witness.phi2.field, "violation_form");
    const WitnessMoment moment(kspec, triple, witness.phi1, witness.phi2, witness.n_power);
    return moment(coupling);
}

void write_gram_csv(const GramReport& report, std::ostream& out) {
    std::vector<std::string> fields(report.order());
    for (std::size_t c = 0; c < fields.size(); ++c) fields[c] = "g" + std::to_string(c);
    write_csv_row(out, fields);
    for (const std::vector<double>& row : report.matrix) {
        for (std::size_t c = 0; c < row.size(); ++c) fields[c] = fmt(row[c]);
        write_csv_row(out, fields);
    }
}

std::string gram_summary_json(const GramReport& report) {
    std::ostringstream out;
    out << "{\"mode\":\"" << (report.mode == GramMode::full ? "full" : "conditional")
        << "\",\"min_eig\":" << fmt(report.min_eigenvalue) << ",\"order\":" << report.order()
        << "}";
    return out.str();
}

std::string witness_json(const ViolationWitness& witness) {
    std::ostringstream out;
    out << "{\"probe_time\":" << fmt(witness.probe_time)
        << ",\"phi1_width\":" << fmt(witness.phi1_width)
        << ",\"phi2_coefficient\":" << fmt(witness.phi2_coefficient)
        << ",\"n_power\":" << witness.n_power
        << ",\"integral_value\":" << fmt(witness.integral_value)
        << ",\"lambda0\":" << fmt(witness.lambda0) << "}";
    return out.str();
}

} // namespace levyfields
