#pragma once

#include <complex>
#include <vector>

#include "levyfields/lattice.hpp"
#include "levyfields/rng.hpp"

// Infinitely divisible noise laws: characteristic exponent, cumulant
// constants, and exact lattice sampling.
//
// A noise law is described by a triple (a, sigma, jumps): drift a, Gaussian
// scale sigma, and a finite list of jump atoms.  Its characteristic exponent
// is
//
//   psi(t) = i a t - sigma^2 t^2 / 2
//          + sum_i w_i (e^{i s_i t} - 1 - i s_i t / (1 + s_i^2)),
//
// and a noise sample over a region of volume v has characteristic function
// e^{v psi(t)}.  Keeping the jump measure atomic makes every cumulant and
// every sampling step exact -- no quadrature enters below.

namespace levyfields {

struct JumpAtom {
    double location = 0.0; // s, must be nonzero
    double weight = 0.0;   // w, must be positive

    bool operator==(const JumpAtom&) const = default;
};

class JumpMeasure {
public:
    JumpMeasure() = default;
    explicit JumpMeasure(std::vector<JumpAtom> atoms); // validates atoms

    const std::vector<JumpAtom>& atoms() const { return atoms_; }
    double total_mass() const { return total_mass_; }

    // sum_i w_i s_i^n (the n-th moment of the jump measure).
    double moment(int n) const;

    bool operator==(const JumpMeasure&) const = default;

private:
    std::vector<JumpAtom> atoms_;
    double total_mass_ = 0.0;
};

struct LevyTriple {
    double a = 0.0;     // drift
    double sigma = 0.0; // Gaussian scale, >= 0
    JumpMeasure jumps;

    void validate() const; // throws DomainError on sigma < 0

    bool operator==(const LevyTriple&) const = default;
};

// Cumulants c_1..c_N of the law with exponent psi.
struct CumulantSequence {
    std::vector<double> values; // values[k] = c_{k+1}

    int max_order() const { return static_cast<int>(values.size()); }
    double operator()(int n) const { return values.at(static_cast<std::size_t>(n - 1)); }
};

// The characteristic exponent psi(t).  psi(0) = 0, psi(-t) = conj(psi(t)).
std::complex<double> psi_eval(const LevyTriple& triple, double t);

// c_1 = a + sum w s^3/(1+s^2); c_2 = sigma^2 + sum w s^2; c_n = sum w s^n
// for n >= 3.  These are the derivatives c_n = (-i)^n psi^(n)(0).
double cumulant(const LevyTriple& triple, int n);
CumulantSequence cumulants(const LevyTriple& triple, int max_order);

// Same law with the drift replaced so that c_1 = 0 (mean-zero noise).
LevyTriple center(const LevyTriple& triple);

// One draw of the noise mass in a region of volume v: characteristic
// function e^{v psi}.  Decomposition: deterministic part b*v with
// b = a - sum w s/(1+s^2), plus Gaussian(0, sigma^2 v), plus a Poisson(v*|M|)
// number of jumps with sizes drawn from the normalized atom weights.  The
// same stream always reproduces the same value.
double sample_site(const LevyTriple& triple, double volume, RngStream rng);

// Independent per-site noise on a lattice, stored as densities: each site
// carries sample_site(volume = delta^d) / delta^d, so the Riemann pairing
// delta^d sum f(x) field(x) is the integral of f against the noise.
// Site substreams are addressed by flat index; the result is bit-identical
// for a fixed stream at any thread count.
LatticeField sample_noise(const LevyTriple& triple, const LatticeSpec& lattice, RngStream rng);

// Serial twin of sample_noise, kept as a reference for the parallel kernel.
LatticeField sample_noise_reference(const LevyTriple& triple, const LatticeSpec& lattice,
                                    RngStream rng);

// The jump-only family (0, 0, {(1/n, n^2 sigma^2)}) that approaches the
// Gaussian law of variance sigma^2 as n grows: c_2 = sigma^2 for every n
// while c_4 = sigma^2 / n^2.
LevyTriple gaussian_limit_triple(int n, double sigma);

} // namespace levyfields
