#include "levyfields/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "levyfields/errors.hpp"
#include "levyfields/kernel.hpp"
#include "levyfields/parallel.hpp"
#include "levyfields/quadrature.hpp"
#include "levyfields/tabular.hpp"

namespace levyfields {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void check_momentum(const std::vector<double>& k, const char* what) {
    if (k.empty()) throw SizeError(std::string(what) + ": momentum needs >= 1 component");
}

void check_off_shell(double k_sq, double m0, const char* what) {
    if (std::abs(k_sq - m0 * m0) < kMassShellBand)
        throw MassShellError(std::string(what) + ": momentum in the mass-shell band, k^2 = " +
                             fmt(k_sq));
}

} // namespace

double minkowski_sq(const std::vector<double>& k) {
    check_momentum(k, "minkowski_sq");
    double space = 0.0;
    for (std::size_t i = 1; i < k.size(); ++i) space += k[i] * k[i];
    return k[0] * k[0] - space;
}

void ConeMembership::validate() const {
    if (!(mass >= 0.0)) throw DomainError("ConeMembership: mass must be >= 0");
}

bool ConeMembership::contains(const std::vector<double>& k) const {
    validate();
    const double k_sq = minkowski_sq(k);
    if (!(k_sq > mass * mass)) return false;
    return which == Which::forward ? k[0] > 0.0 : k[0] < 0.0;
}

bool ConeMembership::contains_closure(const std::vector<double>& k) const {
    validate();
    const double k_sq = minkowski_sq(k);
    if (!(k_sq >= mass * mass)) return false;
    return which == Which::forward ? k[0] >= 0.0 : k[0] <= 0.0;
}

LaplaceIdentity laplace_identity_check(double alpha, double m0, double x) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("laplace_identity_check: alpha must lie in (0, 1)");
    if (!(m0 > 0.0)) throw DomainError("laplace_identity_check: m0 must be > 0");
    if (!(x > 0.0)) throw DomainError("laplace_identity_check: x must be > 0");

    LaplaceIdentity out;
    out.lhs = fourier_cosine_integral(
        [&](double k) { return std::pow(k * k + m0 * m0, -alpha); }, x);

    // Right side with the endpoint substitution u = t^{1-alpha}, t = r - m0:
    // t^{-alpha} dt = du / (1-alpha), leaving a bounded smooth integrand.
    const double p = 1.0 / (1.0 - alpha);
    const double t_max = 50.0 / x;
    const double u_max = std::pow(t_max, 1.0 - alpha);
    const double integral = integrate(
        [&](double u) {
            const double t = std::pow(u, p);
            return std::exp(-x * (m0 + t)) * std::pow(t + 2.0 * m0, -alpha) / (1.0 - alpha);
        },
        0.0, u_max);
    out.rhs = 2.0 * std::sin(kPi * alpha) * integral;
    return out;
}

MuDensities mu_densities(double alpha, double m0, const std::vector<double>& k) {
    if (!(alpha > 0.0 && alpha <= 0.5))
        throw DomainError("mu_densities: alpha must lie in (0, 1/2]");
    if (!(m0 > 0.0)) throw DomainError("mu_densities: m0 must be > 0");
    check_momentum(k, "mu_densities");
    const double k_sq = minkowski_sq(k);
    check_off_shell(k_sq, m0, "mu_densities");

    const double d = static_cast<double>(k.size());
    const double prefactor = std::pow(2.0 * kPi, -0.5 * d);
    const double gap = k_sq - m0 * m0;
    const double power = std::pow(std::abs(gap), -alpha);

    MuDensities out;
    if (gap > 0.0) {
        const double half = prefactor * std::sin(kPi * alpha) * power;
        if (k[0] > 0.0) out.mu_plus = half;
        if (k[0] < 0.0) out.mu_minus = half;
        // cos(pi/2) is an exact zero of the formula; keep it exact.
        out.mu0 = alpha == 0.5 ? 0.0 : prefactor * std::cos(kPi * alpha) * power;
    } else {
        out.mu0 = prefactor * power;
    }
    return out;
}

double hilbert_rho_transform(double alpha, double m0, double k_sq) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("hilbert_rho_transform: alpha must lie in (0, 1)");
    if (!(m0 > 0.0)) throw DomainError("hilbert_rho_transform: m0 must be > 0");
    check_off_shell(k_sq, m0, "hilbert_rho_transform");

    const double gap = k_sq - m0 * m0;
    const double power = std::pow(std::abs(gap), -alpha);
    if (gap > 0.0) {
        // Principal value; cot(pi/2) is an exact zero of the closed form.
        return alpha == 0.5 ? 0.0 : kPi * power / std::tan(kPi * alpha);
    }
    return kPi * power / std::sin(kPi * alpha);
}

double wightman2_density(double alpha, double m0, double c2, const std::vector<double>& k) {
    if (!(alpha > 0.0 && alpha < 0.5))
        throw DomainError("wightman2_density: alpha must lie in (0, 1/2)");
    if (!(m0 > 0.0)) throw DomainError("wightman2_density: m0 must be > 0");
    check_momentum(k, "wightman2_density");
    const double k_sq = minkowski_sq(k);
    check_off_shell(k_sq, m0, "wightman2_density");

    const double gap = k_sq - m0 * m0;
    if (!(gap > 0.0) || !(k[0] < 0.0)) return 0.0;
    return c2 * 2.0 * std::sin(2.0 * kPi * alpha) * std::pow(gap, -2.0 * alpha);
}

double wightman_trunc_density(double alpha, double m0, int n, double cn,
                              const std::vector<std::vector<double>>& momenta) {
    if (!(alpha > 0.0 && alpha <= 0.5))
        throw DomainError("wightman_trunc_density: alpha must lie in (0, 1/2]");
    if (n < 2) throw DomainError("wightman_trunc_density: n must be >= 2");
    if (alpha == 0.5 && n == 2)
        throw DomainError("wightman_trunc_density: at alpha = 1/2 the two-point object is the "
                          "sharp mass-shell measure, not a pointwise density");
    if (momenta.size() != static_cast<std::size_t>(n) - 1)
        throw SizeError("wightman_trunc_density: expected n-1 momenta");
    const std::size_t dim = momenta.front().size();
    for (const std::vector<double>& k : momenta) {
        check_momentum(k, "wightman_trunc_density");
        if (k.size() != dim)
            throw SizeError("wightman_trunc_density: momenta must share one dimension");
    }

    // The last momentum is fixed by conservation; all n must be off shell.
    std::vector<std::vector<double>> all = momenta;
    std::vector<double> balance(dim, 0.0);
    for (const std::vector<double>& k : momenta)
        for (std::size_t i = 0; i < dim; ++i) balance[i] -= k[i];
    all.push_back(std::move(balance));

    std::vector<MuDensities> mu;
    mu.reserve(all.size());
    for (const std::vector<double>& k : all) mu.push_back(mu_densities(alpha, m0, k));

    double j_sum = 0.0;
    for (std::size_t j = 0; j < all.size(); ++j) {
        double term = mu[j].mu0;
        for (std::size_t l = 0; l < j && term != 0.0; ++l) term *= mu[l].mu_minus;
        for (std::size_t l = j + 1; l < all.size() && term != 0.0; ++l) term *= mu[l].mu_plus;
        j_sum += term;
    }
    const double d = static_cast<double>(dim);
    return cn * std::pow(2.0 * kPi, d) * std::ldexp(1.0, n - 1) * j_sum;
}

void GridAxes::validate() const {
    if (k0_steps < 1 || ks_steps < 1) throw DomainError("GridAxes: steps must be >= 1");
    if (!(k0_max >= k0_min) || !(ks_max >= ks_min))
        throw DomainError("GridAxes: axis max must be >= min");
    if (!(ks_min >= 0.0)) throw DomainError("GridAxes: spatial norm must be >= 0");
}

std::size_t SpectralGrid::index(int i0, int is) const {
    return static_cast<std::size_t>(i0) * static_cast<std::size_t>(axes.ks_steps) +
           static_cast<std::size_t>(is);
}

std::vector<double> SpectralGrid::momentum(int i0, int is) const {
    const double dk0 =
        axes.k0_steps > 1 ? (axes.k0_max - axes.k0_min) / (axes.k0_steps - 1) : 0.0;
    const double dks =
        axes.ks_steps > 1 ? (axes.ks_max - axes.ks_min) / (axes.ks_steps - 1) : 0.0;
    std::vector<double> k(static_cast<std::size_t>(d), 0.0);
    k[0] = axes.k0_min + i0 * dk0;
    k[1] = axes.ks_min + is * dks;
    return k;
}

SpectralGrid make_density_grid(const PointDensity& density, int d, const GridAxes& axes,
                               double mass_gap) {
    if (d < 2) throw DomainError("make_density_grid: needs d >= 2 for a spatial axis");
    if (!(mass_gap > 0.0)) throw DomainError("make_density_grid: mass gap must be > 0");
    axes.validate();

    SpectralGrid grid;
    grid.d = d;
    grid.axes = axes;
    grid.mass_gap = mass_gap;
    const std::size_t count =
        static_cast<std::size_t>(axes.k0_steps) * static_cast<std::size_t>(axes.ks_steps);
    grid.values.assign(count, 0.0);
    grid.near_shell.assign(count, 0);

    parallel_for(static_cast<std::size_t>(axes.k0_steps), [&](std::size_t row) {
        const int i0 = static_cast<int>(row);
        for (int is = 0; is < axes.ks_steps; ++is) {
            const std::vector<double> k = grid.momentum(i0, is);
            const std::size_t at = grid.index(i0, is);
            if (std::abs(minkowski_sq(k) - mass_gap * mass_gap) < kMassShellBand) {
                grid.near_shell[at] = 1;
                continue;
            }
            grid.values[at] = density(k);
        }
    });
    return grid;
}

SupportReport spectral_support_check(const TupleDensity& density, int n, double m0,
                                     const SpectralGrid& grid) {
    if (n < 2) throw DomainError("spectral_support_check: n must be >= 2");
    if (!(m0 > 0.0)) throw DomainError("spectral_support_check: m0 must be > 0");
    if (grid.d < 2) throw DomainError("spectral_support_check: grid needs d >= 2");
    grid.axes.validate();

    const int points = grid.axes.k0_steps * grid.axes.ks_steps;
    const int slots = n - 1;
    const ConeMembership backward{ConeMembership::Which::backward, m0};
    const double m_sq = m0 * m0;

    // One chunk per choice of the first momentum; each chunk runs the
    // odometer over the remaining slots and the +- spatial orientations of
    // momenta 2..n-1 (the first orientation is fixed by rotation
    // invariance).  Chunk-local tallies keep the reduction deterministic.
    std::vector<SupportReport> local(static_cast<std::size_t>(points));
    parallel_for(static_cast<std::size_t>(points), [&](std::size_t first) {
        SupportReport& tally = local[first];
        std::vector<int> at(static_cast<std::size_t>(slots), 0);      // grid point per slot
        std::vector<int> orient(static_cast<std::size_t>(slots), 0);  // 0: +ks, 1: -ks
        at[0] = static_cast<int>(first);
        std::vector<std::vector<double>> tuple(static_cast<std::size_t>(slots));
        while (true) {
            // Assemble the tuple and its conservation partner.
            std::vector<double> balance(static_cast<std::size_t>(grid.d), 0.0);
            for (int s = 0; s < slots; ++s) {
                tuple[static_cast<std::size_t>(s)] =
                    grid.momentum(at[static_cast<std::size_t>(s)] / grid.axes.ks_steps,
                                  at[static_cast<std::size_t>(s)] % grid.axes.ks_steps);
                if (orient[static_cast<std::size_t>(s)]) tuple[static_cast<std::size_t>(s)][1] =
                    -tuple[static_cast<std::size_t>(s)][1];
                for (std::size_t i = 0; i < balance.size(); ++i)
                    balance[i] -= tuple[static_cast<std::size_t>(s)][i];
            }

            bool on_shell = std::abs(minkowski_sq(balance) - m_sq) < kMassShellBand;
            for (int s = 0; s < slots && !on_shell; ++s)
                on_shell = std::abs(minkowski_sq(tuple[static_cast<std::size_t>(s)]) - m_sq) <
                           kMassShellBand;
            if (on_shell) {
                ++tally.tuples_skipped;
            } else {
                bool outside = false;
                std::vector<double> partial(static_cast<std::size_t>(grid.d), 0.0);
                for (int r = 0; r < slots && !outside; ++r) {
                    for (std::size_t i = 0; i < partial.size(); ++i)
                        partial[i] += tuple[static_cast<std::size_t>(r)][i];
                    outside = !backward.contains_closure(partial);
                }
                const double value = density(tuple);
                ++tally.tuples_checked;
                if (outside) {
                    ++tally.tuples_outside;
                    tally.max_abs_violation =
                        std::max(tally.max_abs_violation, std::abs(value));
                }
            }

            // Advance: orientations of slots 2.., then grid points of slots 2..
            int s = 1;
            for (; s < slots; ++s) {
                if (orient[static_cast<std::size_t>(s)] == 0) {
                    orient[static_cast<std::size_t>(s)] = 1;
                    break;
                }
                orient[static_cast<std::size_t>(s)] = 0;
            }
            if (s < slots) continue;
            for (s = 1; s < slots; ++s) {
                if (++at[static_cast<std::size_t>(s)] < points) break;
                at[static_cast<std::size_t>(s)] = 0;
            }
            if (s >= slots) break;
        }
    });

    SupportReport report;
    report.check = "spectral_support";
    report.n = n;
    report.d = grid.d;
    report.mass_gap = m0;
    report.axes = grid.axes;
    for (const SupportReport& tally : local) {
        report.max_abs_violation = std::max(report.max_abs_violation, tally.max_abs_violation);
        report.tuples_checked += tally.tuples_checked;
        report.tuples_outside += tally.tuples_outside;
        report.tuples_skipped += tally.tuples_skipped;
    }
    return report;
}

std::vector<RestrictionPoint> euclidean_restriction_check(double alpha, double m0, double c2,
                                                          const std::vector<double>& xs) {
    if (!(alpha > 0.0 && alpha < 0.5))
        throw DomainError("euclidean_restriction_check: alpha must lie in (0, 1/2)");
    if (!(m0 > 0.0)) throw DomainError("euclidean_restriction_check: m0 must be > 0");
    for (double x : xs)
        if (!(x > 0.0)) throw DomainError("euclidean_restriction_check: points must be > 0");

    const KernelSpec doubled{2.0 * alpha, m0, 1};
    std::vector<RestrictionPoint> out;
    out.reserve(xs.size());
    for (double x : xs) {
        RestrictionPoint point;
        point.x = x;
        point.s_direct = c2 * kernel_position_radial(doubled, x);
        if (c2 != 0.0) {
            // Laplace transform of the two-point density over the backward
            // cone, d = 1: with k^0 = -(m0 + t) and u = t^{1-2 alpha} the
            // density's endpoint power t^{-2 alpha} is absorbed into du,
            // leaving a bounded integrand.
            const double p = 1.0 / (1.0 - 2.0 * alpha);
            const double t_max = 50.0 / x;
            const double u_max = std::pow(t_max, 1.0 - 2.0 * alpha);
            const double integral = integrate(
                [&](double u) {
                    const double t = std::pow(u, p);
                    return std::exp(-x * (m0 + t)) *
                           std::pow(t + 2.0 * m0, -2.0 * alpha) / (1.0 - 2.0 * alpha);
                },
                0.0, u_max);
            point.s_laplace = c2 * 2.0 * std::sin(2.0 * kPi * alpha) * integral;
        }
        out.push_back(point);
    }
    return out;
}

void write_grid_csv(const SpectralGrid& grid, std::ostream& out) {
    const ConeMembership backward{ConeMembership::Which::backward, grid.mass_gap};
    write_csv_row(out, {"k0", "k_spatial_norm", "value", "in_support"});
    for (int i0 = 0; i0 < grid.axes.k0_steps; ++i0)
        for (int is = 0; is < grid.axes.ks_steps; ++is) {
            const std::vector<double> k = grid.momentum(i0, is);
            write_csv_row(out, {fmt(k[0]), fmt(k[1]), fmt(grid.values[grid.index(i0, is)]),
                                backward.contains_closure(k) ? "1" : "0"});
        }
}

std::string support_report_json(const SupportReport& report) {
    std::ostringstream out;
    out << "{\"check\":\"" << report.check << "\",\"max_abs_violation\":"
        << fmt(report.max_abs_violation) << ",\"grid_spec\":{\"d\":" << report.d
        << ",\"n\":" << report.n << ",\"mass_gap\":" << fmt(report.mass_gap)
        << ",\"k0\":[" << fmt(report.axes.k0_min) << ',' << fmt(report.axes.k0_max) << ','
        << report.axes.k0_steps << "],\"k_spatial\":[" << fmt(report.axes.ks_min) << ','
        << fmt(report.axes.ks_max) << ',' << report.axes.ks_steps
        << "]},\"tolerances\":{\"shell_band\":" << fmt(kMassShellBand)
        << "},\"tuples\":{\"checked\":" << report.tuples_checked
        << ",\"outside\":" << report.tuples_outside
        << ",\"skipped\":" << report.tuples_skipped << "}}";
    return out.str();
}

} // namespace levyfields
