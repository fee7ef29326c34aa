#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "levyfields/kernel.hpp"
#include "levyfields/lattice.hpp"
#include "levyfields/levy.hpp"
#include "levyfields/rng.hpp"

// Correlation moments of the convolved noise field X = kernel * noise.
//
// The fully connected ("truncated") n-point value factorizes through the
// noise cumulants:
//
//   T_n(phi_1, ..., phi_n) = c_n * delta^d * sum_x  prod_j (kernel*phi_j)(x)
//
// and the full n-point moment is the sum over set partitions of products of
// connected values, which partitions.moments_from_truncated assembles.

namespace levyfields {

// A lattice test function.  The flag marks support restricted to strictly
// positive time (axis-0 coordinate > 0), the half-space the reflection
// checks pair across.
struct TestFunction {
    LatticeField field;
    bool half_space_positive = false;

    // Throws DomainError on non-finite values, SupportError when the
    // half-space flag is set but a value at time <= 0 is nonzero.
    void validate() const;
};

struct SchwingerEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t n_samples = 0;
};

// Connected n-point value of the arguments (formula above).
// Throws SizeError for an empty list, LatticeMismatch on mixed grids.
double truncated_schwinger(const KernelSpec& kspec, const LevyTriple& triple,
                           const std::vector<TestFunction>& phis);

// Full n-point moment: partition sum of connected values over blocks.
// Throws SizeError when n exceeds the supported partition order (12).
double schwinger(const KernelSpec& kspec, const LevyTriple& triple,
                 const std::vector<TestFunction>& phis);

// Monte Carlo estimate of the full moment: draw the noise, convolve, pair
// against every argument, average the product.  The standard error comes
// from batch means (100 batches).  Sampling parallelizes over batches, but
// every sample owns a counter-based substream addressed by its global index,
// so the estimate is bit-identical at any thread count.
SchwingerEstimate mc_schwinger(const KernelSpec& kspec, const LevyTriple& triple,
                               const std::vector<TestFunction>& phis,
                               std::int64_t n_samples, RngStream rng);

// Clustering diagnostic: connected value of left arguments against right
// arguments translated by round(lambda * direction / delta) lattice steps,
// one entry per lambda.  direction must be a unit vector of the lattice
// dimension; translations that push support outside the signed index range
// throw OffLattice.
std::vector<std::pair<double, double>> cluster_scan(
    const KernelSpec& kspec, const LevyTriple& triple,
    const std::vector<TestFunction>& phis_left,
    const std::vector<TestFunction>& phis_right,
    const std::vector<double>& direction, const std::vector<double>& lambdas);

// CSV form of a cluster_scan result, one record per lambda with columns
// lambda, value, abs_value, log_abs_value (log of an exact zero prints as
// -inf).
void write_cluster_csv(const std::vector<std::pair<double, double>>& scan,
                       std::ostream& out);

} // namespace levyfields
