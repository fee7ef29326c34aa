#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "levyfields/kernel.hpp"
#include "levyfields/lattice.hpp"
#include "levyfields/levy.hpp"
#include "levyfields/schwinger.hpp"

// Time reflection, the reflection quadratic form, Gram-matrix positivity
// probes, and the constructive search for a positivity violation.
//
// The probes all revolve around the pairing of time-reflected arguments:
// for tuples (phi_1..phi_k) supported at positive time, the matrix
// M_{kl} = S_{k+l}(theta tuple_k (x) tuple_l) must be positive semidefinite
// when the field law admits a transfer-operator (physical Hilbert space)
// interpretation.  For noise laws with jumps that positivity fails, and
// find_rp_violation builds an explicit witness.

namespace levyfields {

// Whether a Gram matrix uses full moments with the constant slot included
// (the order-0 row/column with S_0 = 1) or connected moments over tuples of
// order >= 1 only.
enum class GramMode { full, conditional };

struct GramReport {
    // matrix[k][l] = S_{k+l}(theta tuple_k (x) tuple_l), full or connected
    // per mode.  The pairing sums behind the entries run over the window
    // minus the wrap time plane: that slab is the one whose mirror image
    // falls outside the window, so dropping it makes the quadrature domain
    // reflection-invariant (the omitted tail is ~exp(-L/2), far below
    // tolerance).  Entries are computed independently; symmetry then holds
    // to rounding and is verified (1e-12 relative) rather than imposed.
    std::vector<std::vector<double>> matrix;
    double min_eigenvalue = 0.0;
    std::vector<std::vector<TestFunction>> family;
    GramMode mode = GramMode::full;

    std::size_t order() const { return matrix.size(); } // matrix dimension
};

// Parameters of the constructive violation search; defaults suit d = 1
// with a mass gap of order 1.
struct RpSearchConfig {
    LatticeSpec lattice{1, 512, 0.05};

    double probe_time = 1.0;   // x = (probe_time, 0): where q must go negative

    // The sign-flip function phi2: two radial bumps at positive times whose
    // combination cancels the reflection-symmetric part at the probe point.
    // Placing them asymmetrically around the probe time strengthens the odd
    // remainder there.
    double pulse_time_a = 0.3;
    double pulse_time_b = 1.3;
    double pulse_width = 0.05;

    // Widths of the concentration spike phi1, tried in order.  Each spike is
    // a mass-one bump at the probe point; narrower spikes sharpen the peak
    // of its quadratic form against the off-peak bound.  Widths below the
    // lattice spacing concentrate the spike on a single site, which is as
    // sharp as the grid allows.
    std::vector<double> spike_widths{0.02, 0.04};

    // Radius of the ball around the probe point (and its mirror) excluded
    // when taking the off-peak bound D = max |q(spike)|.
    double exclusion_radius = 0.5;

    // Largest power tried in the escalation sum q(phi1)^{2n} q(phi2);
    // beyond 6 the order-(4n+2) lattice sums lose float64 precision.
    int max_power = 6;

    // Absolute bisection tolerance for the coupling threshold lambda0.
    double lambda_tol = 1e-6;
};

// An explicit witness that the moment sequence of the convolved field is
// not reflection positive for weak coupling.
struct ViolationWitness {
    // Spike and sign-flip functions; default to empty fields on the minimal
    // lattice so the struct can be built before the search fills it in.
    TestFunction phi1{LatticeField(LatticeSpec{}), false}; // spike, scaled by D^{-1/2}
    TestFunction phi2{LatticeField(LatticeSpec{}), false}; // sign-flip combination
    int n_power = 0; // power n in the escalation sum

    // delta^d * (half-space sum of q(phi1)^{2n} q(phi2)); negative.  Twice
    // this value is the connected order-(4n+2) moment of the witness tuple
    // paired against its reflection, divided by the cumulant c_{4n+2}.
    double integral_value = 0.0;

    // Largest coupling lambda (bisection root) for which the full witness
    // moment of the lambda-scaled noise stays negative: rescaling every
    // connected part by lambda turns the witness form into a polynomial in
    // lambda whose linear term is the negative connected moment and whose
    // top term carries the positive Gaussian pairings.
    double lambda0 = 0.0;

    // Construction parameters, kept for serialization.
    double probe_time = 0.0;
    double phi1_width = 0.0;       // spike width that produced the witness
    double phi2_coefficient = 0.0; // weight of the second pulse in phi2
};

// Mirrors the time axis.  The result is supported at negative times, so its
// half-space flag is always cleared.
TestFunction reflect_time(const TestFunction& phi);

// Weighted sum over the x^0 > 0 half-space, delta^d included, counting the
// two mirror-fixed time planes (x^0 = 0 and the wrap plane) at half weight.
// For any reflection-even field the full lattice_sum equals exactly twice
// this value.
double half_space_sum(const LatticeField& f);

// The reflection quadratic form of phi:
//   q(phi) = (G * theta phi) . (G * phi)
// as a pointwise product of convolutions.  Also forms the time-even and
// time-odd halves of phi and checks the equivalent difference-of-squares
// route (G*phi_even)^2 - (G*phi_odd)^2 against the product route.
// Throws SupportError unless phi is flagged and supported at positive time.
LatticeField q_fn(const KernelSpec& kspec, const TestFunction& phi);

// Gram matrix of the reflection pairing over a family of test-function
// tuples.  Full mode prepends the constant slot (S_0 = 1) and fills entries
// with full moments; conditional mode uses connected moments and requires
// every tuple non-empty.  All tuple entries must be flagged positive-time
// on a common lattice matching kspec; every pairing order k+l must be <= 12
// (SizeError).  Entries are computed in parallel and the minimum eigenvalue
// comes from a symmetric eigensolver on the symmetrized matrix.
GramReport rp_gram(const KernelSpec& kspec, const LevyTriple& triple,
                   const std::vector<std::vector<TestFunction>>& family, GramMode mode);

// Constructive search for a reflection-positivity violation of the noise
// law given by triple (which must have jumps; a purely Gaussian law has no
// violation and raises SearchFailed immediately).  Recipe: build phi2 so
// q(phi2) < 0 at the probe point, concentrate phi1 there, escalate the
// power n until the half-space sum of q(phi1)^{2n} q(phi2) turns negative,
// then bisect the coupling threshold lambda0.  Throws SearchFailed with
// diagnostics when the parameter budget is exhausted.
ViolationWitness find_rp_violation(const KernelSpec& kspec, const LevyTriple& triple,
                                   const RpSearchConfig& config = {});

// Full moment of the witness tuple theta(phi1^{2n} phi2) (x) (phi1^{2n} phi2)
// under the coupling-scaled noise law (every cumulant multiplied by the
// coupling) -- the polynomial whose largest negative coupling is lambda0.
// Because the tuple involves only four distinct fields, the moment is
// assembled from their joint cumulants by the moment-cumulant recursion,
// which stays exact at orders beyond the set-partition cap of 12.
double violation_form(const KernelSpec& kspec, const LevyTriple& triple,
                      const ViolationWitness& witness, double coupling);

// Dense-matrix CSV (one row per line, numbers at full precision).
void write_gram_csv(const GramReport& report, std::ostream& out);

// One-line JSON summaries.
std::string gram_summary_json(const GramReport& report);
std::string witness_json(const ViolationWitness& witness);

} // namespace levyfields
