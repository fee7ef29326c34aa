#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

// Bridge between the Euclidean kernel and the relativistic momentum-space
// picture: the Fourier/Laplace identity behind the mass-superposition
// representation, the spectral densities of the continued correlation
// functions, their support (mass-gap) checks, and the restriction of the
// momentum-space two-point density back to Euclidean points.
//
// Conventions, fixed here once:
//   * Minkowski square k^2 = (k^0)^2 - |vec k|^2 (signature +,-,...,-);
//   * the two-point density lives on the backward mass cone (k^0 < 0,
//     k^2 > m0^2); "forward" means k^0 > 0;
//   * density prefactors (2pi)^{-d/2} follow the symmetric Fourier
//     normalization per argument.  The Euclidean restriction below pairs a
//     density with the plain (prefactor-free) Laplace transform, matching
//     kernel_position's unnormalized-Fourier convention in d = 1; the two
//     conventions differ by (2pi)^{d/2} per argument, and picking one
//     consistently is all that matters for the checks.
//
// Densities are pointwise evaluators, defined off the mass shell only: any
// momentum with |k^2 - m0^2| < kMassShellBand raises MassShellError.  The
// singularity at the shell is integrable for alpha < 1/2, and integrals
// against test functions use the endpoint substitution u = t^{1-2 alpha}
// instead of sampling near the shell.

namespace levyfields {

// Exclusion band around the mass shell for pointwise density evaluation.
inline constexpr double kMassShellBand = 1e-9;

// Minkowski square of a momentum (first component is k^0).
double minkowski_sq(const std::vector<double>& k);

// Open solid mass cone {k^2 > mass^2, sign(k^0) fixed} and its closure.
struct ConeMembership {
    enum class Which { forward, backward };
    Which which = Which::backward;
    double mass = 0.0; // >= 0

    void validate() const;
    bool contains(const std::vector<double>& k) const;         // open cone
    bool contains_closure(const std::vector<double>& k) const; // closed cone
};

// The two-sided Fourier/Laplace identity for the kernel symbol in one
// variable: for alpha in (0, 1), m0 > 0, x > 0,
//   integral e^{ikx} (k^2 + m0^2)^{-alpha} dk
//     = 2 sin(pi alpha) integral_{m0}^inf e^{-rx} (r^2 - m0^2)^{-alpha} dr.
// The left side is computed by the oscillatory cosine integrator (symmetric
// truncation with alternating-tail acceleration), the right side by an
// endpoint-substituted quadrature; both to the requested relative accuracy.
struct LaplaceIdentity {
    double lhs = 0.0;
    double rhs = 0.0;
};
LaplaceIdentity laplace_identity_check(double alpha, double m0, double x);

// One-momentum spectral weights entering the continued n-point densities
// (alpha in (0, 1/2], d from the momentum's size):
//   mu_plus  = (2pi)^{-d/2} sin(pi alpha) 1_{k^2 > m0^2, k^0 > 0} (k^2-m0^2)^{-alpha}
//   mu_minus = the same on the backward half-cone k^0 < 0
//   mu0      = (2pi)^{-d/2} [cos(pi alpha) 1_{k^2 > m0^2} + 1_{k^2 < m0^2}]
//              |k^2 - m0^2|^{-alpha}
struct MuDensities {
    double mu_plus = 0.0;
    double mu_minus = 0.0;
    double mu0 = 0.0;
};
MuDensities mu_densities(double alpha, double m0, const std::vector<double>& k);

// Closed form of the mass integral
//   integral_{m^2 > m0^2} (m^2 - k_sq)^{-1} (m^2 - m0^2)^{-alpha} dm^2
// (principal value when k_sq > m0^2):
//   pi cot(pi alpha) |k_sq - m0^2|^{-alpha}   for k_sq > m0^2,
//   pi / sin(pi alpha) |k_sq - m0^2|^{-alpha} for k_sq < m0^2.
// alpha in (0, 1); MassShellError within the shell band.
double hilbert_rho_transform(double alpha, double m0, double k_sq);

// Momentum-space density of the continued truncated two-point function at
// (k, -k), for alpha in (0, 1/2):
//   c2 * 2 sin(2 pi alpha) 1_{k^2 > m0^2, k^0 < 0}(k) (k^2 - m0^2)^{-2 alpha};
// identically zero outside the backward mass cone.
double wightman2_density(double alpha, double m0, double c2, const std::vector<double>& k);

// Momentum-space density (the factor multiplying delta(sum k)) of the
// continued truncated n-point function, n >= 2, at (k_1 .. k_{n-1}) with
// k_n = -sum k_j implied:
//   c_n (2pi)^d 2^{n-1} sum_j [prod_{l<j} mu_minus(k_l)] mu0(k_j)
//                             [prod_{l>j} mu_plus(k_l)].
// alpha in (0, 1/2]; at alpha = 1/2 only n >= 3 is a pointwise density (the
// two-point case degenerates to the sharp mass-shell measure).  At n = 2
// this reduces to wightman2_density via sin cos = sin(2.)/2.
double wightman_trunc_density(double alpha, double m0, int n, double cn,
                              const std::vector<std::vector<double>>& momenta);

// Rectangular evaluation grid in (k^0, |vec k|); momenta are embedded as
// (k0, ks, 0, ..., 0).  Row-major storage, k^0 slowest.
struct GridAxes {
    double k0_min = -4.0;
    double k0_max = 4.0;
    int k0_steps = 33; // grid points per axis, >= 1
    double ks_min = 0.0;
    double ks_max = 3.0;
    int ks_steps = 13;

    void validate() const;
};

struct SpectralGrid {
    int d = 2;
    GridAxes axes;
    double mass_gap = 1.0;
    std::vector<double> values;
    // 1 where |k^2 - mass_gap^2| < kMassShellBand: the value slot holds 0
    // there and the point is excluded from checks.
    std::vector<unsigned char> near_shell;

    std::size_t index(int i0, int is) const;
    std::vector<double> momentum(int i0, int is) const;
};

using PointDensity = std::function<double(const std::vector<double>&)>;
using TupleDensity = std::function<double(const std::vector<std::vector<double>>&)>;

// Tabulates a one-momentum density over the grid (rows evaluated in
// parallel).  Shell-band points are pre-screened (flagged, stored as 0) so
// the evaluator is only called off shell; it must not throw elsewhere.
SpectralGrid make_density_grid(const PointDensity& density, int d, const GridAxes& axes,
                               double mass_gap);

// Scan result of the mass-gap support verification.
struct SupportReport {
    std::string check;
    double max_abs_violation = 0.0;
    std::size_t tuples_checked = 0;
    std::size_t tuples_outside = 0; // tuples where the support forces 0
    std::size_t tuples_skipped = 0; // shell-band skips
    int n = 2;
    int d = 2;
    double mass_gap = 1.0;
    GridAxes axes;
};

// Verifies the spectral condition with mass gap m0: the density must vanish
// whenever some partial sum k_1 + ... + k_r (1 <= r <= n-1) falls outside
// the closed backward mass cone.  Tuples of n-1 momenta are drawn from the
// grid axes; from the second momentum on, both spatial orientations +-ks
// are scanned (the first is fixed by rotation invariance).  Reports the
// largest |density| seen at an out-of-support tuple (0 = pass).
SupportReport spectral_support_check(const TupleDensity& density, int n, double m0,
                                     const SpectralGrid& grid);

// Consistency of the two routes to the Euclidean two-point kernel in d = 1:
// s_direct pairs c2 with the position-space kernel of order 2 alpha;
// s_laplace is the numerical Laplace transform of wightman2_density over
// the backward cone (endpoint-substituted quadrature).  alpha in (0, 1/2),
// every x > 0.
struct RestrictionPoint {
    double x = 0.0;
    double s_direct = 0.0;
    double s_laplace = 0.0;
};
std::vector<RestrictionPoint> euclidean_restriction_check(double alpha, double m0, double c2,
                                                          const std::vector<double>& xs);

// CSV with header k0,k_spatial_norm,value,in_support; in_support is the
// closed-backward-cone indicator at the grid's mass gap.
void write_grid_csv(const SpectralGrid& grid, std::ostream& out);

// One-line JSON: {"check", "max_abs_violation", "grid_spec", "tolerances", ...}.
std::string support_report_json(const SupportReport& report);

} // namespace levyfields
