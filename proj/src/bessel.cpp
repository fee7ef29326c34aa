#include "levyfields/bessel.hpp"

#include <cmath>
#include <string>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>

#include "levyfields/errors.hpp"

namespace levyfields {

namespace {

double integer_order(int n, double z) {
    gsl_sf_result result;
    int status;
    if (n == 0)
        status = gsl_sf_bessel_K0_e(z, &result);
    else if (n == 1)
        status = gsl_sf_bessel_K1_e(z, &result);
    else
        status = gsl_sf_bessel_Kn_e(n, z, &result);
    // K decays like e^{-z}; for very large z the value underflows to an
    // honest zero, which is fine for the exponentially damped integrands
    // this feeds.
    if (status == GSL_EUNDRFLW) return 0.0;
    if (status != 0)
        throw ConvergenceError("bessel_k: GSL K_" + std::to_string(n) +
                               " failed: " + gsl_strerror(status));
    return result.val;
}

double half_integer_order(int n_plus_half, double z) {
    // K_{1/2}(z) = sqrt(pi/(2z)) e^{-z}; upward recurrence
    // K_{nu+1} = K_{nu-1} + (2 nu / z) K_nu starting from K_{-1/2} = K_{1/2}.
    const double base = std::sqrt(1.5707963267948966 / z) * std::exp(-z);
    double below = base; // K_{-1/2}
    double current = base;
    for (int m = 0; m < n_plus_half; ++m) {
        const double nu = static_cast<double>(m) + 0.5;
        const double above = below + (2.0 * nu / z) * current;
        below = current;
        current = above;
    }
    return current;
}

} // namespace

double bessel_k(double nu, double z) {
    if (!(z > 0.0)) throw DomainError("bessel_k: argument must be > 0");
    nu = std::abs(nu); // K_{-nu} = K_nu
    const double doubled = 2.0 * nu;
    const long rounded = std::lround(doubled);
    if (std::abs(doubled - static_cast<double>(rounded)) > 1e-12)
        throw DomainError("bessel_k: order must be an integer or half-integer");
    if (rounded % 2 == 0) return integer_order(static_cast<int>(rounded / 2), z);
    return half_integer_order(static_cast<int>((rounded - 1) / 2), z);
}

} // namespace levyfields
