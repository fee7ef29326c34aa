#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstddef>
#include <vector>

#include "levyfields/errors.hpp"
#include "levyfields/parallel.hpp"
#include "levyfields/partitions.hpp"
#include "levyfields/schwinger.hpp"

using namespace levyfields;

namespace {

// Gaussian bump of the given width centered at a physical point, cut to
// exact zero beyond 8 widths (~1e-14 relative) so supports are compact and
// translations stay on-grid.
TestFunction bump(const LatticeSpec& spec, const std::vector<double>& center,
                  double width, double amplitude = 1.0) {
    LatticeField f(spec);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const std::vector<double> x = spec.site_point(i);
        double r_sq = 0.0;
        for (int a = 0; a < spec.d; ++a) r_sq += (x[(std::size_t)a] - center[(std::size_t)a]) *
                                                 (x[(std::size_t)a] - center[(std::size_t)a]);
        f[i] = r_sq > 64.0 * width * width
                   ? 0.0
                   : amplitude * std::exp(-r_sq / (2.0 * width * width));
    }
    return TestFunction{f, false};
}

LevyTriple gaussian_unit() { return LevyTriple{0.0, 1.0, JumpMeasure{}}; }

LevyTriple centered_single_atom() {
    return center(LevyTriple{0.0, 0.0, JumpMeasure({JumpAtom{1.0, 1.0}})});
}

// Asymmetric law with all cumulants nonzero, including the first.
LevyTriple mixed_triple() {
    return LevyTriple{0.3, 0.8, JumpMeasure({JumpAtom{1.0, 0.7}, JumpAtom{-2.0, 0.3}})};
}

} // namespace

TEST_CASE("vanishing cumulant forces a zero connected value") {
    const LatticeSpec spec{1, 64, 0.25};
    const KernelSpec kernel{0.5, 1.0, 1};
    const std::vector<TestFunction> phis(3, bump(spec, {0.0}, 0.5));
    CHECK(cumulant(gaussian_unit(), 3) == 0.0);
    CHECK(truncated_schwinger(kernel, gaussian_unit(), phis) == 0.0);
}

TEST_CASE("connected two-point value is a positive quadratic form") {
    const LatticeSpec spec{1, 128, 0.2};
    const KernelSpec kernel{0.5, 1.0, 1};
    const TestFunction phi = bump(spec, {0.3}, 0.4);
    const double value = truncated_schwinger(kernel, mixed_triple(), {phi, phi});
    CHECK(value > 0.0);
    // Direct form: c_2 * |kernel * phi|^2 under the lattice pairing.
    const LatticeField conv = convolve(kernel, phi.field);
    CHECK(value == doctest::Approx(cumulant(mixed_triple(), 2) * lattice_inner(conv, conv))
                       .epsilon(1e-13));
}

TEST_CASE("two-point value matches an independent position-space double sum") {
    // For the unit normal law the two-point value is the quadratic form of
    // the squared kernel, whose position form in d=1 at exponent 2*(1/2) = 1
    // is exactly e^{-|x-y|} / 2.  Summing that closed form directly over the
    // bump's support needs no Fourier machinery at all.
    const LatticeSpec spec{1, 1024, 0.02};
    const KernelSpec kernel{0.5, 1.0, 1};
    const TestFunction phi = bump(spec, {0.0}, 0.1);
    const double value = truncated_schwinger(kernel, gaussian_unit(), {phi, phi});

    std::vector<double> coord, weight;
    for (std::size_t i = 0; i < phi.field.size(); ++i) {
        if (std::abs(phi.field[i]) < 1e-16) continue;
        coord.push_back(spec.coordinate(static_cast<int>(i)));
        weight.push_back(phi.field[i]);
    }
    double oracle = 0.0;
    for (std::size_t a = 0; a < coord.size(); ++a)
        for (std::size_t b = 0; b < coord.size(); ++b)
            oracle += weight[a] * weight[b] * 0.5 * std::exp(-std::abs(coord[a] - coord[b]));
    oracle *= spec.cell_volume() * spec.cell_volume();
    CHECK(value == doctest::Approx(oracle).epsilon(0.02));
}

TEST_CASE("odd moments of a symmetric law vanish identically") {
    const LatticeSpec spec{1, 64, 0.25};
    const KernelSpec kernel{0.5, 1.0, 1};
    const std::vector<TestFunction> three{bump(spec, {0.0}, 0.5), bump(spec, {1.0}, 0.3),
                                          bump(spec, {-0.5}, 0.4)};
    CHECK(schwinger(kernel, gaussian_unit(), three) == 0.0);
    const std::vector<TestFunction> five(5, bump(spec, {0.0}, 0.5));
    CHECK(schwinger(kernel, gaussian_unit(), five) == 0.0);
}

TEST_CASE("fourth moment of the normal law is three squared pair values") {
    const LatticeSpec spec{1, 128, 0.2};
    const KernelSpec kernel{0.5, 1.0, 1};
    const TestFunction phi = bump(spec, {0.0}, 0.4);
    const double pair = schwinger(kernel, gaussian_unit(), {phi, phi});
    const double fourth = schwinger(kernel, gaussian_unit(), {phi, phi, phi, phi});
    CHECK(fourth == doctest::Approx(3.0 * pair * pair).epsilon(1e-12));
}

TEST_CASE("centered single-atom jump law has a unit-weight second moment") {
    const LatticeSpec spec{1, 128, 0.2};
    const KernelSpec kernel{0.5, 1.0, 1};
    const TestFunction phi = bump(spec, {0.0}, 0.4);
    const LevyTriple triple = centered_single_atom();
    CHECK(cumulant(triple, 1) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(cumulant(triple, 2) == doctest::Approx(1.0).epsilon(1e-15));
    const LatticeField conv = convolve(kernel, phi.field);
    const double norm_sq = lattice_inner(conv, conv);
    CHECK(schwinger(kernel, triple, {phi, phi}) == doctest::Approx(norm_sq).epsilon(1e-13));
    CHECK(truncated_schwinger(kernel, triple, {phi, phi})
          == doctest::Approx(norm_sq).epsilon(1e-13));
}

TEST_CASE("sampled two-point estimate agrees with the analytic value") {
    const LatticeSpec spec{1, 256, 0.1};
    const KernelSpec kernel{0.5, 1.0, 1};
    const TestFunction phi = bump(spec, {0.0}, 0.5);
    const double analytic = schwinger(kernel, gaussian_unit(), {phi, phi});
    const SchwingerEstimate est =
        mc_schwinger(kernel, gaussian_unit(), {phi, phi}, 200000, RngStream{2024, 7});
    CHECK(est.n_samples == 200000);
    CHECK(est.std_error > 0.0);
    CHECK(std::abs(est.value - analytic) <= 5.0 * est.std_error);
}

TEST_CASE("sampled third moment of a jump law agrees with the analytic value") {
    const LatticeSpec spec{1, 128, 0.1};
    const KernelSpec kernel{0.5, 1.0, 1};
    const TestFunction phi = bump(spec, {0.0}, 0.5);
    const LevyTriple triple = centered_single_atom();
    const std::vector<TestFunction> phis{phi, phi, phi};
    const double analytic = schwinger(kernel, triple, phis);
    CHECK(analytic != 0.0);
    const SchwingerEstimate est = mc_schwinger(kernel, triple, phis, 100000, RngStream{11, 3});
    CHECK(std::abs(est.value - analytic) <= 5.0 * est.std_error);
}

TEST_CASE("zero test function gives a zero estimate with zero spread") {
    const LatticeSpec spec{1, 32, 0.25};
    const KernelSpec kernel{0.5, 1.0, 1};
    const TestFunction zero{LatticeField(spec), false};
    const SchwingerEstimate est =
        mc_schwinger(kernel, gaussian_unit(), {zero, zero}, 100, RngStream{1, 1});
    CHECK(est.value == 0.0);
    CHECK(est.std_error == 0.0);
    CHECK(est.n_samples == 100);
}

TEST_CASE("standard error shrinks like the square root of the sample count") {
    const LatticeSpec spec{1, 64, 0.2};
    const KernelSpec kernel{0.5, 1.0, 1};
    const TestFunction phi = bump(spec, {0.0}, 0.5);
    const SchwingerEstimate small =
        mc_schwinger(kernel, mixed_triple(), {phi, phi}, 3000, RngStream{5, 1});
    const SchwingerEstimate large =
        mc_schwinger(kernel, mixed_triple(), {phi, phi}, 12000, RngStream{5, 2});
    const double ratio = small.std_error / large.std_error;
    CHECK(ratio > 1.2);
    CHECK(ratio < 3.3);
}

TEST_CASE("sampling is reproducible and independent of the thread setting") {
    const LatticeSpec spec{1, 64, 0.2};
    const KernelSpec kernel{0.5, 1.0, 1};
    const TestFunction phi = bump(spec, {0.0}, 0.5);
    const SchwingerEstimate a =
        mc_schwinger(kernel, mixed_triple(), {phi, phi}, 500, RngStream{42, 9});
    set_max_threads(1);
    const SchwingerEstimate b =
        mc_schwinger(kernel, mixed_triple(), {phi, phi}, 500, RngStream{42, 9});
    set_max_threads(0);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
}

TEST_CASE("cluster scan: zero shift matches, decay follows the mass rate") {
    const LatticeSpec spec{1, 512, 0.05};
    const KernelSpec kernel{0.5, 1.0, 1};
    const TestFunction left = bump(spec, {0.0}, 0.2);
    const TestFunction right = bump(spec, {0.0}, 0.2);
    const auto scan = cluster_scan(kernel, gaussian_unit(), {left}, {right}, {1.0},
                                   {0.0, 5.0, 10.0});
    REQUIRE(scan.size() == 3);
    CHECK(scan[0].second
          == doctest::Approx(truncated_schwinger(kernel, gaussian_unit(), {left, right}))
                 .epsilon(1e-15));
    const double slope =
        (std::log(std::abs(scan[2].second)) - std::log(std::abs(scan[1].second))) / 5.0;
    CHECK(slope > -1.1);
    CHECK(slope < -0.9);
}

TEST_CASE("cluster scan decreases monotonically for non-negative bumps") {
    const LatticeSpec spec{1, 256, 0.1};
    const KernelSpec kernel{0.5, 1.0, 1};
    const TestFunction phi = bump(spec, {0.0}, 0.3);
    std::vector<double> lambdas;
    for (int l = 0; l <= 8; ++l) lambdas.push_back(static_cast<double>(l));
    const auto scan = cluster_scan(kernel, gaussian_unit(), {phi}, {phi}, {1.0}, lambdas);
    for (std::size_t i = 1; i < scan.size(); ++i) {
        CHECK(scan[i].second > 0.0);
        CHECK(scan[i].second < scan[i - 1].second);
    }
}

TEST_CASE("cluster scan rejects bad directions and off-grid shifts") {
    const LatticeSpec spec{1, 64, 0.2};
    const KernelSpec kernel{0.5, 1.0, 1};
    const TestFunction phi = bump(spec, {0.0}, 0.3);
    CHECK_THROWS_AS(cluster_scan(kernel, gaussian_unit(), {phi}, {phi}, {0.5}, {1.0}),
                    DomainError);
    CHECK_THROWS_AS(cluster_scan(kernel, gaussian_unit(), {phi}, {phi}, {1.0}, {100.0}),
                    OffLattice);
}

TEST_CASE("moment is symmetric under argument permutation") {
    const LatticeSpec spec{1, 64, 0.25};
    const KernelSpec kernel{0.4, 1.0, 1};
    const TestFunction a = bump(spec, {0.0}, 0.4);
    const TestFunction b = bump(spec, {1.0}, 0.6);
    const double order1 = schwinger(kernel, mixed_triple(), {a, a, b, b});
    const double order2 = schwinger(kernel, mixed_triple(), {b, a, b, a});
    CHECK(order1 == doctest::Approx(order2).epsilon(1e-13));
}

TEST_CASE("moment is multilinear in each slot") {
    const LatticeSpec spec{1, 64, 0.25};
    const KernelSpec kernel{0.5, 1.0, 1};
    const TestFunction phi = bump(spec, {0.0}, 0.4);
    const TestFunction psi = bump(spec, {0.8}, 0.5);
    const TestFunction chi = bump(spec, {-0.6}, 0.3);
    TestFunction combo{add(scale(phi.field, 2.0), scale(psi.field, -0.7)), false};
    const double direct = schwinger(kernel, mixed_triple(), {combo, chi, chi});
    const double expanded = 2.0 * schwinger(kernel, mixed_triple(), {phi, chi, chi}) -
                            0.7 * schwinger(kernel, mixed_triple(), {psi, chi, chi});
    CHECK(direct == doctest::Approx(expanded).epsilon(1e-12));
}

TEST_CASE("connected part is recovered from full moments") {
    const LatticeSpec spec{1, 128, 0.2};
    const KernelSpec kernel{0.5, 1.0, 1};
    const LevyTriple triple = mixed_triple(); // nonzero first cumulant matters here
    const std::vector<TestFunction> phis{bump(spec, {0.0}, 0.4), bump(spec, {0.5}, 0.5),
                                         bump(spec, {-0.4}, 0.3), bump(spec, {1.0}, 0.6)};
    for (int n : {2, 3, 4}) {
        CAPTURE(n);
        const std::vector<TestFunction> used(phis.begin(), phis.begin() + n);
        const auto full = [&](const std::vector<int>& block) {
            std::vector<TestFunction> sub;
            for (int e : block) sub.push_back(used[static_cast<std::size_t>(e - 1)]);
            return schwinger(kernel, triple, sub);
        };
        CHECK(partitions::truncated_from_moments(full, n)
              == doctest::Approx(truncated_schwinger(kernel, triple, used)).epsilon(1e-10));
    }
}

TEST_CASE("moment is invariant under simultaneous interior translation") {
    const LatticeSpec spec{1, 512, 0.1};
    const KernelSpec kernel{0.5, 1.0, 1};
    const LevyTriple triple = mixed_triple();
    const std::vector<TestFunction> phis{bump(spec, {0.0}, 0.3), bump(spec, {0.5}, 0.4),
                                         bump(spec, {-0.5}, 0.35)};
    std::vector<TestFunction> shifted;
    for (const TestFunction& phi : phis)
        shifted.push_back(TestFunction{translate(phi.field, {20}), false});
    CHECK(schwinger(kernel, triple, shifted)
          == doctest::Approx(schwinger(kernel, triple, phis)).epsilon(1e-10));
}

TEST_CASE("argument validation") {
    const LatticeSpec spec{1, 64, 0.25};
    const KernelSpec kernel{0.5, 1.0, 1};
    const TestFunction phi = bump(spec, {0.0}, 0.4);
    CHECK_THROWS_AS(truncated_schwinger(kernel, gaussian_unit(), {}), SizeError);
    CHECK_THROWS_AS(schwinger(kernel, gaussian_unit(),
                              std::vector<TestFunction>(13, phi)),
                    SizeError);
    const LatticeSpec other{1, 32, 0.25};
    CHECK_THROWS_AS(
        truncated_schwinger(kernel, gaussian_unit(), {phi, bump(other, {0.0}, 0.4)}),
        LatticeMismatch);
    CHECK_THROWS_AS(
        mc_schwinger(kernel, gaussian_unit(), {phi, phi}, 1, RngStream{1, 1}),
        SizeError);

    // The positive-time flag is enforced.
    TestFunction flagged = phi;
    flagged.half_space_positive = true;
    CHECK_THROWS_AS(flagged.validate(), SupportError);
    LatticeField half(spec);
    for (std::size_t i = 0; i < half.size(); ++i) {
        const double t = spec.coordinate(static_cast<int>(i));
        half[i] = t > 0.0 ? std::exp(-t) : 0.0;
    }
    TestFunction ok{half, true};
    ok.validate(); // no throw
}
