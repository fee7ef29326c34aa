#pragma once

#include <vector>

#include "levyfields/lattice.hpp"

// The smoothing kernel G = (-Laplacian + m0^2)^{-alpha}: spectral symbol,
// FFT application to lattice fields, and position-space evaluation through
// the mass-superposition (Kallen-Lehmann) quadrature.
//
// Normalization, fixed once for the whole project:
//   * the spectral symbol is g(k) = (|k|^2 + m0^2)^{-alpha};
//   * convolve(f) approximates (G*f)(x) = (2pi)^{-d} Int g(k) fhat(k) e^{ikx} dk
//     with fhat the continuum Fourier transform of f;
//   * free_covariance(m, d, x) is the full d-dimensional inverse transform
//     (2pi)^{-d} Int e^{ikx} / (|k|^2 + m^2) d^dk  =
//     (2pi)^{-d/2} (m/r)^{(d-2)/2} K_{(d-2)/2}(m r),  r = |x|,
//     so in d=1 it reduces to e^{-m r} / (2 m);
//   * kernel_position(spec, x) = Int free_covariance(m, d, x) rho_alpha(dm^2).
// With these choices kernel_position(x) = 2pi * (G*delta-density)(x): the
// mass-measure normalization of rho_alpha carries an intrinsic factor 2pi
// relative to the spectral symbol (the power-law Euler integral
// Int rho_alpha(dm^2)/(k^2+m^2) equals 2pi (k^2+m0^2)^{-alpha}).  In d=1
// kernel_position therefore coincides with the plain (unnormalized) Fourier
// integral Int_R e^{ikx} (k^2+m0^2)^{-alpha} dk.

namespace levyfields {

struct KernelSpec {
    double alpha = 0.5; // order, in (0, 1]
    double m0 = 1.0;    // mass gap, > 0
    int d = 1;

    void validate() const;
    bool operator==(const KernelSpec&) const = default;
};

// Spectral symbol (|k|^2 + m0^2)^{-alpha}; strictly positive and radial.
double fourier_multiplier(const KernelSpec& spec, const std::vector<double>& k);
double fourier_multiplier_ksq(const KernelSpec& spec, double k_sq);

// Applies G by FFT on a zero-padded grid (factor 2 per axis) and crops back,
// approximating convolution on the whole space rather than the torus.
// Linear in f; deterministic for any thread count.
LatticeField convolve(const KernelSpec& spec, const LatticeField& f);

// Direct-summation DFT twin of convolve (O(N^2) in the padded site count);
// reference for testing and benchmarking on small lattices.
LatticeField convolve_reference(const KernelSpec& spec, const LatticeField& f);

// Free two-point kernel of mass m at radius r > 0 (closed Bessel forms; see
// the normalization note above).
double free_covariance_radial(double m, int d, double r);
double free_covariance(double m, int d, const std::vector<double>& x);

// Mass-measure density: rho_alpha(m^2) = 2 sin(pi alpha) (m^2 - m0^2)^{-alpha}
// for m^2 > m0^2, else 0.  Requires alpha in (0, 1).
double rho_alpha(double alpha, double m0, double m_sq);

// Position-space kernel by adaptive quadrature of the mass integral
// Int free_covariance(m, d, x) rho_alpha(dm^2), with the endpoint
// substitution u = (m^2 - m0^2)^{1-alpha}.  Requires alpha in (0,1), r > 0.
double kernel_position_radial(const KernelSpec& spec, double r);
double kernel_position(const KernelSpec& spec, const std::vector<double>& x);

} // namespace levyfields
