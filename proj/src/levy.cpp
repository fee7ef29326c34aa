#include "levyfields/levy.hpp"

#include <cmath>

#include "levyfields/errors.hpp"
#include "levyfields/parallel.hpp"

namespace levyfields {

JumpMeasure::JumpMeasure(std::vector<JumpAtom> atoms) : atoms_(std::move(atoms)) {
    for (const JumpAtom& atom : atoms_) {
        if (atom.location == 0.0) throw DomainError("JumpMeasure: atom location must be nonzero");
        if (!(atom.weight > 0.0)) throw DomainError("JumpMeasure: atom weight must be positive");
    }
    for (const JumpAtom& atom : atoms_) total_mass_ += atom.weight;
}

double JumpMeasure::moment(int n) const {
    double sum = 0.0;
    for (const JumpAtom& atom : atoms_) sum += atom.weight * std::pow(atom.location, n);
    return sum;
}

void LevyTriple::validate() const {
    if (!(sigma >= 0.0)) throw DomainError("LevyTriple: sigma must be >= 0");
}

std::complex<double> psi_eval(const LevyTriple& triple, double t) {
    triple.validate();
    std::complex<double> value(-0.5 * triple.sigma * triple.sigma * t * t, triple.a * t);
    for (const JumpAtom& atom : triple.jumps.atoms()) {
        const double st = atom.location * t;
        const double compensator = atom.location * t / (1.0 + atom.location * atom.location);
        value += atom.weight *
                 std::complex<double>(std::cos(st) - 1.0, std::sin(st) - compensator);
    }
    return value;
}

double cumulant(const LevyTriple& triple, int n) {
    triple.validate();
    if (n < 1) throw DomainError("cumulant: order must be >= 1");
    if (n == 1) {
        double jump_mean = 0.0;
        for (const JumpAtom& atom : triple.jumps.atoms()) {
            const double s = atom.location;
            jump_mean += atom.weight * s * s * s / (1.0 + s * s);
        }
        return triple.a + jump_mean;
    }
    if (n == 2) return triple.sigma * triple.sigma + triple.jumps.moment(2);
    return triple.jumps.moment(n);
}

CumulantSequence cumulants(const LevyTriple& triple, int max_order) {
    if (max_order < 1) throw DomainError("cumulants: max order must be >= 1");
    CumulantSequence seq;
    seq.values.reserve(static_cast<std::size_t>(max_order));
    for (int n = 1; n <= max_order; ++n) seq.values.push_back(cumulant(triple, n));
    return seq;
}

LevyTriple center(const LevyTriple& triple) {
    LevyTriple out = triple;
    out.a = triple.a - cumulant(triple, 1);
    return out;
}

namespace {

// Deterministic part of the decomposition: the drift left over once the
// jump part is written as an uncompensated Poisson sum.
double decomposition_drift(const LevyTriple& triple) {
    double b = triple.a;
    for (const JumpAtom& atom : triple.jumps.atoms()) {
        const double s = atom.location;
        b -= atom.weight * s / (1.0 + s * s);
    }
    return b;
}

double sample_site_with(const LevyTriple& triple, double volume, CounterRng& rng) {
    double value = decomposition_drift(triple) * volume;
    if (triple.sigma > 0.0) value += triple.sigma * std::sqrt(volume) * rng.next_normal();
    const double intensity = volume * triple.jumps.total_mass();
    const std::uint64_t jumps = rng.next_poisson(intensity);
    for (std::uint64_t j = 0; j < jumps; ++j) {
        // Atom choice proportional to weight.
        double target = rng.next_uniform() * triple.jumps.total_mass();
        for (const JumpAtom& atom : triple.jumps.atoms()) {
            target -= atom.weight;
            if (target <= 0.0) {
                value += atom.location;
                break;
            }
        }
    }
    return value;
}

} // namespace

double sample_site(const LevyTriple& triple, double volume, RngStream rng) {
    triple.validate();
    if (!(volume > 0.0)) throw DomainError("sample_site: volume must be > 0");
    CounterRng counter(rng);
    return sample_site_with(triple, volume, counter);
}

namespace {

LatticeField sample_noise_impl(const LevyTriple& triple, const LatticeSpec& lattice,
                               RngStream rng, bool parallel) {
    triple.validate();
    lattice.validate();
    LatticeField field(lattice);
    const double volume = lattice.cell_volume();
    const double inv_volume = 1.0 / volume;
    auto fill_site = [&](std::size_t site) {
        CounterRng counter(rng, site);
        field[site] = sample_site_with(triple, volume, counter) * inv_volume;
    };
    if (parallel) {
        parallel_for(field.size(), fill_site);
    } else {
        for (std::size_t site = 0; site < field.size(); ++site) fill_site(site);
    }
    return field;
}

} // namespace

LatticeField sample_noise(const LevyTriple& triple, const LatticeSpec& lattice, RngStream rng) {
    return sample_noise_impl(triple, lattice, rng, true);
}

LatticeField sample_noise_reference(const LevyTriple& triple, const LatticeSpec& lattice,
                                    RngStream rng) {
    return sample_noise_impl(triple, lattice, rng, false);
}

LevyTriple gaussian_limit_triple(int n, double sigma) {
    if (n < 1) throw DomainError("gaussian_limit_triple: n must be >= 1");
    if (!(sigma > 0.0)) throw DomainError("gaussian_limit_triple: sigma must be > 0");
    LevyTriple triple;
    triple.jumps = JumpMeasure({{1.0 / n, static_cast<double>(n) * n * sigma * sigma}});
    return triple;
}

} // namespace levyfields
