#pragma once

#include <functional>

// Adaptive quadrature wrappers (Gauss-Kronrod, GSL backend) plus the
// oscillatory cosine-transform integrator used by the Fourier-route checks.
// All routines throw ConvergenceError when the requested tolerance cannot be
// certified.

namespace levyfields {

struct QuadratureOptions {
    double rel_tol = 1e-6;
    double abs_floor = 1e-12; // absolute error floor for near-zero results
};

using Integrand = std::function<double(double)>;

// Integral over [a, b].  Integrable endpoint singularities are handled
// (adaptive subdivision with extrapolation).
double integrate(const Integrand& f, double a, double b, QuadratureOptions opts = {});

// Integral over [a, infinity).
double integrate_to_infinity(const Integrand& f, double a, QuadratureOptions opts = {});

// 2 * Int_0^inf cos(k x) g(k) dk for a smooth g decreasing to zero at
// infinity and x > 0.  The integrand need not be absolutely integrable
// (g may decay as slowly as a small negative power): the integral is split
// at the cosine zeros into half-period segments whose alternating partial
// sums are accelerated by repeated pairwise averaging.
double fourier_cosine_integral(const Integrand& g, double x, QuadratureOptions opts = {});

} // namespace levyfields
