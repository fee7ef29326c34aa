#include "levyfields/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>

#include "levyfields/errors.hpp"
#include "levyfields/parallel.hpp"

static_assert(std::endian::native == std::endian::little,
              "field serialization assumes a little-endian host");

namespace levyfields {

void LatticeSpec::validate() const {
    if (d < 1) throw DomainError("LatticeSpec: dimension must be >= 1");
    if (n_per_axis < 2 || (n_per_axis & (n_per_axis - 1)) != 0)
        throw DomainError("LatticeSpec: n_per_axis must be a power of two >= 2");
    if (!(delta > 0.0)) throw DomainError("LatticeSpec: delta must be > 0");
    // Guard against index overflow for absurd d.
    double count = 1.0;
    for (int a = 0; a < d; ++a) count *= n_per_axis;
    if (count > 9.0e15) throw SizeError("LatticeSpec: site count exceeds 2^53");
}

std::size_t LatticeSpec::site_count() const {
    std::size_t count = 1;
    for (int a = 0; a < d; ++a) count *= static_cast<std::size_t>(n_per_axis);
    return count;
}

double LatticeSpec::cell_volume() const { return std::pow(delta, d); }

double LatticeSpec::side_length() const { return n_per_axis * delta; }

int LatticeSpec::signed_index(int storage_index) const {
    return storage_index < n_per_axis / 2 ? storage_index : storage_index - n_per_axis;
}

double LatticeSpec::coordinate(int storage_index) const {
    return signed_index(storage_index) * delta;
}

int LatticeSpec::storage_index(int signed_idx) const {
    if (signed_idx < -n_per_axis / 2 || signed_idx >= n_per_axis / 2)
        throw DomainError("LatticeSpec: signed index outside [-n/2, n/2)");
    return signed_idx >= 0 ? signed_idx : signed_idx + n_per_axis;
}

void LatticeSpec::decode(std::size_t flat, int* multi_index) const {
    for (int a = d - 1; a >= 0; --a) {
        multi_index[a] = static_cast<int>(flat % static_cast<std::size_t>(n_per_axis));
        flat /= static_cast<std::size_t>(n_per_axis);
    }
}

std::size_t LatticeSpec::encode(const int* multi_index) const {
    std::size_t flat = 0;
    for (int a = 0; a < d; ++a)
        flat = flat * static_cast<std::size_t>(n_per_axis) +
               static_cast<std::size_t>(multi_index[a]);
    return flat;
}

std::vector<double> LatticeSpec::site_point(std::size_t flat) const {
    std::vector<int> idx(static_cast<std::size_t>(d));
    decode(flat, idx.data());
    std::vector<double> x(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) x[static_cast<std::size_t>(a)] = coordinate(idx[static_cast<std::size_t>(a)]);
    return x;
}

LatticeField::LatticeField(const LatticeSpec& s) : spec(s), values(s.site_count(), 0.0) {
    spec.validate();
}

LatticeField::LatticeField(const LatticeSpec& s, std::vector<double> v)
    : spec(s), values(std::move(v)) {
    spec.validate();
    if (values.size() != spec.site_count())
        throw DomainError("LatticeField: value count does not match the lattice");
}

void require_same_spec(const LatticeField& a, const LatticeField& b, const char* what) {
    if (!(a.spec == b.spec))
        throw LatticeMismatch(std::string(what) + ": fields live on different lattices");
}

LatticeField add(const LatticeField& a, const LatticeField& b) {
    require_same_spec(a, b, "add");
    LatticeField out(a.spec);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

LatticeField subtract(const LatticeField& a, const LatticeField& b) {
    require_same_spec(a, b, "subtract");
    LatticeField out(a.spec);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

LatticeField scale(const LatticeField& a, double factor) {
    LatticeField out(a.spec);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = factor * a[i];
    return out;
}

LatticeField multiply(const LatticeField& a, const LatticeField& b) {
    require_same_spec(a, b, "multiply");
    LatticeField out(a.spec);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

double lattice_inner(const LatticeField& a, const LatticeField& b) {
    require_same_spec(a, b, "lattice_inner");
    return a.spec.cell_volume() *
           deterministic_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

double lattice_sum(const LatticeField& a) {
    return a.spec.cell_volume() * deterministic_sum(a.size(), [&](std::size_t i) { return a[i]; });
}

double max_abs(const LatticeField& a) {
    double m = 0.0;
    for (double v : a.values) m = std::max(m, std::abs(v));
    return m;
}

void require_finite(const LatticeField& a, const char* what) {
    for (double v : a.values)
        if (!std::isfinite(v))
            throw DomainError(std::string(what) + ": field contains a non-finite value");
}

LatticeField reflect_time(const LatticeField& a) {
    LatticeField out(a.spec);
    const int n = a.spec.n_per_axis;
    const std::size_t count = a.size();
    std::vector<int> idx(static_cast<std::size_t>(a.spec.d));
    for (std::size_t flat = 0; flat < count; ++flat) {
        a.spec.decode(flat, idx.data());
        idx[0] = (n - idx[0]) % n;
        out[a.spec.encode(idx.data())] = a[flat];
    }
    return out;
}

LatticeField translate(const LatticeField& a, const std::vector<int>& steps) {
    if (static_cast<int>(steps.size()) != a.spec.d)
        throw DomainError("translate: need one step count per axis");
    LatticeField out(a.spec);
    const int n = a.spec.n_per_axis;
    std::vector<int> idx(static_cast<std::size_t>(a.spec.d));
    for (std::size_t flat = 0; flat < a.size(); ++flat) {
        if (a[flat] == 0.0) continue;
        a.spec.decode(flat, idx.data());
        for (int ax = 0; ax < a.spec.d; ++ax) {
            const int moved = a.spec.signed_index(idx[static_cast<std::size_t>(ax)]) +
                              steps[static_cast<std::size_t>(ax)];
            if (moved < -n / 2 || moved >= n / 2)
                throw OffLattice("translate: support would leave the grid");
            idx[static_cast<std::size_t>(ax)] = a.spec.storage_index(moved);
        }
        out[a.spec.encode(idx.data())] = a[flat];
    }
    return out;
}

void save_field(const LatticeField& f, const std::string& name,
                const std::filesystem::path& path) {
    if (name.find('\n') != std::string::npos)
        throw DomainError("save_field: field name must not contain newlines");
    require_finite(f, "save_field");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("save_field: cannot open " + path.string());
    char spacing[64];
    std::snprintf(spacing, sizeof spacing, "%.17g", f.spec.delta);
    out << f.spec.d << '\n' << f.spec.n_per_axis << '\n' << spacing << '\n' << name << '\n';
    out.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!out) throw Error("save_field: write failed for " + path.string());
}

std::pair<LatticeField, std::string> load_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("load_field: cannot open " + path.string());
    LatticeSpec spec;
    std::string line;
    if (!std::getline(in, line)) throw Error("load_field: truncated header");
    spec.d = std::stoi(line);
    if (!std::getline(in, line)) throw Error("load_field: truncated header");
    spec.n_per_axis = std::stoi(line);
    if (!std::getline(in, line)) throw Error("load_field: truncated header");
    spec.delta = std::stod(line);
    std::string name;
    if (!std::getline(in, name)) throw Error("load_field: truncated header");
    spec.validate();
    std::vector<double> values(spec.site_count());
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != values.size() * sizeof(double))
        throw Error("load_field: truncated value block");
    LatticeField f(spec, std::move(values));
    require_finite(f, "load_field");
    return {std::move(f), std::move(name)};
}

} // namespace levyfields
