#pragma once

// Modified Bessel function of the second kind K_nu(z) for the orders this
// project needs: integers and half-integers (every (d-2)/2 with integer d).
// Half-integer orders use the elementary closed forms and the three-term
// recurrence (exact up to rounding); integer orders delegate to the GSL
// special-function library (relative accuracy ~1e-15, well past the 1e-8
// target here).

namespace levyfields {

// K_nu(z) for z > 0 and 2*nu integer.  Symmetric in nu: K_{-nu} = K_nu.
// Throws DomainError for z <= 0 or an unsupported order.
double bessel_k(double nu, double z);

} // namespace levyfields
