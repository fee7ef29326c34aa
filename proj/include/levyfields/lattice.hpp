#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

// Regular d-dimensional grids and real fields living on them.
//
// Geometry convention: each axis has n sites at spacing delta, addressed by
// storage indices 0..n-1 in wrap-around (FFT) order.  Storage index i sits at
// physical coordinate (i < n/2 ? i : i - n) * delta, so site 0 is at the
// origin and coordinates cover [-L/2, L/2) with L = n*delta.  Flat indices
// are row-major with axis 0 slowest (C order), matching the FFT layout used
// by the convolution engine.

namespace levyfields {

struct LatticeSpec {
    int d = 1;          // dimension >= 1
    int n_per_axis = 2; // power of two, >= 2
    double delta = 1.0; // spacing > 0

    // Throws DomainError when any invariant fails.
    void validate() const;

    std::size_t site_count() const;
    double cell_volume() const;              // delta^d
    double side_length() const;              // n_per_axis * delta
    double coordinate(int storage_index) const;
    int storage_index(int signed_index) const; // inverse of signed coordinate index

    // Signed per-axis index in [-n/2, n/2): coordinate = signed index * delta.
    int signed_index(int storage_index) const;

    void decode(std::size_t flat, int* multi_index) const;
    std::size_t encode(const int* multi_index) const;
    std::vector<double> site_point(std::size_t flat) const;

    bool operator==(const LatticeSpec&) const = default;
};

struct LatticeField {
    LatticeSpec spec;
    std::vector<double> values;

    explicit LatticeField(const LatticeSpec& s);
    LatticeField(const LatticeSpec& s, std::vector<double> v);

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
};

// Throws LatticeMismatch when the two fields live on different grids.
void require_same_spec(const LatticeField& a, const LatticeField& b, const char* what);

// Pointwise arithmetic (new field; specs must match).
LatticeField add(const LatticeField& a, const LatticeField& b);
LatticeField subtract(const LatticeField& a, const LatticeField& b);
LatticeField scale(const LatticeField& a, double factor);
LatticeField multiply(const LatticeField& a, const LatticeField& b);

// Riemann pairing delta^d * sum a(x) b(x), order-stable under threading.
double lattice_inner(const LatticeField& a, const LatticeField& b);

// delta^d * sum a(x).
double lattice_sum(const LatticeField& a);

double max_abs(const LatticeField& a);

// Throws DomainError if any value is NaN or infinite; used at interface
// boundaries (serialization, experiment output).
void require_finite(const LatticeField& a, const char* what);

// Mirror of the time axis (axis 0): storage index i -> (n - i) mod n, which
// negates the physical time coordinate.  An exact involution.
LatticeField reflect_time(const LatticeField& a);

// Shift by an integer number of lattice steps per axis, in signed-coordinate
// space (no wrapping).  Throws OffLattice if any nonzero value would be
// carried beyond the signed index range [-n/2, n/2).
LatticeField translate(const LatticeField& a, const std::vector<int>& steps);

// Flat binary serialization: 4 text lines (d, n_per_axis, delta, name)
// followed by the values as little-endian float64 in flat-index order.
void save_field(const LatticeField& f, const std::string& name,
                const std::filesystem::path& path);
std::pair<LatticeField, std::string> load_field(const std::filesystem::path& path);

} // namespace levyfields
