#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <vector>

#include "levyfields/errors.hpp"
#include "levyfields/lattice.hpp"
#include "levyfields/parallel.hpp"

using namespace levyfields;

TEST_CASE("lattice spec invariants are enforced") {
    CHECK_THROWS_AS((LatticeSpec{0, 8, 0.5}.validate()), DomainError);
    CHECK_THROWS_AS((LatticeSpec{1, 6, 0.5}.validate()), DomainError);
    CHECK_THROWS_AS((LatticeSpec{1, 1, 0.5}.validate()), DomainError);
    CHECK_THROWS_AS((LatticeSpec{1, 8, 0.0}.validate()), DomainError);
    CHECK_THROWS_AS((LatticeSpec{1, 8, -1.0}.validate()), DomainError);
    CHECK_NOTHROW((LatticeSpec{3, 16, 0.1}.validate()));
}

TEST_CASE("coordinates wrap around with the origin at site zero") {
    LatticeSpec spec{1, 8, 0.5};
    const double expected[] = {0.0, 0.5, 1.0, 1.5, -2.0, -1.5, -1.0, -0.5};
    for (int i = 0; i < 8; ++i) {
        CHECK(spec.coordinate(i) == doctest::Approx(expected[i]));
        CHECK(spec.storage_index(spec.signed_index(i)) == i);
    }
    CHECK(spec.coordinate(0) == 0.0);
    CHECK(spec.side_length() == doctest::Approx(4.0));
    CHECK(spec.cell_volume() == doctest::Approx(0.5));
    CHECK_THROWS_AS(spec.storage_index(4), DomainError);
    CHECK_THROWS_AS(spec.storage_index(-5), DomainError);
}

TEST_CASE("flat indices round-trip through multi-indices") {
    LatticeSpec spec{2, 4, 1.0};
    CHECK(spec.site_count() == 16);
    for (std::size_t flat = 0; flat < 16; ++flat) {
        int idx[2];
        spec.decode(flat, idx);
        CHECK(spec.encode(idx) == flat);
    }
    // Axis 0 is the slow axis.
    int idx[2] = {1, 2};
    CHECK(spec.encode(idx) == 6);
    auto x = spec.site_point(6);
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(-2.0));
}

TEST_CASE("time reflection mirrors axis zero and is an involution") {
    LatticeSpec spec{2, 8, 0.5};
    LatticeField f(spec);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = 0.1 * static_cast<double>(i) - 2.0;

    LatticeField r = reflect_time(f);
    // Check coordinates: value at (t, y) moves to (-t, y).
    for (std::size_t flat = 0; flat < f.size(); ++flat) {
        int idx[2];
        spec.decode(flat, idx);
        int mirrored[2] = {(8 - idx[0]) % 8, idx[1]};
        CHECK(r[spec.encode(mirrored)] == f[flat]);
    }
    LatticeField back = reflect_time(r);
    CHECK(back.values == f.values);

    // Sites on the fixed planes stay put.
    int fixed0[2] = {0, 3};
    int fixed4[2] = {4, 3};
    CHECK(r[spec.encode(fixed0)] == f[spec.encode(fixed0)]);
    CHECK(r[spec.encode(fixed4)] == f[spec.encode(fixed4)]);
}

TEST_CASE("translation shifts support and refuses to leave the grid") {
    LatticeSpec spec{1, 16, 0.25};
    LatticeField f(spec);
    f[spec.storage_index(2)] = 1.0; // bump at x = 0.5

    LatticeField shifted = translate(f, {3});
    CHECK(shifted[spec.storage_index(5)] == 1.0); // now at x = 1.25
    CHECK(shifted[spec.storage_index(2)] == 0.0);

    LatticeField back = translate(shifted, {-3});
    CHECK(back.values == f.values);
    CHECK(translate(f, {0}).values == f.values);

    // Signed index range is [-8, 8); pushing the bump to index 8 must throw.
    CHECK_THROWS_AS(translate(f, {6}), OffLattice);
    CHECK_THROWS_AS(translate(f, {-11}), OffLattice);
    CHECK_NOTHROW(translate(f, {5}));
    CHECK_NOTHROW(translate(f, {-10}));

    CHECK_THROWS_AS(translate(f, {1, 1}), DomainError);
}

TEST_CASE("inner products carry the cell volume") {
    LatticeSpec spec{2, 4, 0.5};
    LatticeField ones(spec, std::vector<double>(16, 1.0));
    CHECK(lattice_inner(ones, ones) == doctest::Approx(0.25 * 16));
    CHECK(lattice_sum(ones) == doctest::Approx(4.0));

    LatticeField f(spec), g(spec);
    for (std::size_t i = 0; i < 16; ++i) {
        f[i] = std::sin(0.3 * static_cast<double>(i));
        g[i] = std::cos(0.2 * static_cast<double>(i));
    }
    double direct = 0.0;
    for (std::size_t i = 0; i < 16; ++i) direct += f[i] * g[i];
    CHECK(lattice_inner(f, g) == doctest::Approx(0.25 * direct));

    LatticeSpec other{2, 8, 0.5};
    LatticeField h(other);
    CHECK_THROWS_AS(lattice_inner(f, h), LatticeMismatch);
    CHECK_THROWS_AS(add(f, h), LatticeMismatch);
}

TEST_CASE("pointwise arithmetic works") {
    LatticeSpec spec{1, 4, 1.0};
    LatticeField f(spec, {1.0, 2.0, 3.0, 4.0});
    LatticeField g(spec, {0.5, -1.0, 2.0, 0.0});
    CHECK(add(f, g).values == std::vector<double>{1.5, 1.0, 5.0, 4.0});
    CHECK(subtract(f, g).values == std::vector<double>{0.5, 3.0, 1.0, 4.0});
    CHECK(scale(f, 2.0).values == std::vector<double>{2.0, 4.0, 6.0, 8.0});
    CHECK(multiply(f, g).values == std::vector<double>{0.5, -2.0, 6.0, 0.0});
    CHECK(max_abs(g) == 2.0);
}

TEST_CASE("order-stable sums do not depend on the thread count") {
    const std::size_t n = 100001;
    std::vector<double> data(n);
    for (std::size_t i = 0; i < n; ++i)
        data[i] = std::sin(0.001 * static_cast<double>(i)) * 1e-3 + 1.0 / (1.0 + static_cast<double>(i));

    set_max_threads(1);
    const double serial = deterministic_sum(n, [&](std::size_t i) { return data[i]; });
    set_max_threads(4);
    const double threaded = deterministic_sum(n, [&](std::size_t i) { return data[i]; });
    set_max_threads(0);
    CHECK(serial == threaded); // bitwise equality is the contract
}

TEST_CASE("field serialization round-trips") {
    LatticeSpec spec{2, 8, 0.125};
    LatticeField f(spec);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(static_cast<double>(i) * 0.7) * 3.25;

    const auto path = std::filesystem::temp_directory_path() / "levyfields_field_test.bin";
    save_field(f, "noise sample", path);
    auto [loaded, name] = load_field(path);
    CHECK(name == "noise sample");
    CHECK(loaded.spec == spec);
    CHECK(loaded.values == f.values); // bit-exact

    // Header is human-readable: four text lines before the payload.
    std::ifstream in(path, std::ios::binary);
    std::string l1, l2, l3, l4;
    std::getline(in, l1);
    std::getline(in, l2);
    std::getline(in, l3);
    std::getline(in, l4);
    CHECK(l1 == "2");
    CHECK(l2 == "8");
    CHECK(std::stod(l3) == 0.125);
    CHECK(l4 == "noise sample");

    // Truncated payload is rejected.
    std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
    CHECK_THROWS_AS(load_field(path), Error);
    std::filesystem::remove(path);

    LatticeField bad(spec);
    bad[3] = std::nan("");
    CHECK_THROWS_AS(save_field(bad, "x", path), DomainError);
    CHECK_THROWS_AS(save_field(f, "two\nlines", path), DomainError);
}
