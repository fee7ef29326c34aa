#include "levyfields/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "levyfields/errors.hpp"

namespace levyfields {

namespace {

// GSL aborts by default; switch to status codes once, process-wide.
const int g_handler_off = [] {
    gsl_set_error_handler_off();
    return 0;
}();

struct Workspace {
    gsl_integration_workspace* w;
    explicit Workspace(std::size_t limit) : w(gsl_integration_workspace_alloc(limit)) {
        if (!w) throw Error("quadrature: workspace allocation failed");
    }
    ~Workspace() { gsl_integration_workspace_free(w); }
    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;
};

double trampoline(double x, void* params) {
    return (*static_cast<const Integrand*>(params))(x);
}

// Accept a nonzero GSL status only when the reported error still meets the
// requested tolerance (QAGS often flags benign roundoff on easy integrals).
double checked(int status, double value, double abserr, const QuadratureOptions& opts,
               const char* what) {
    if (status != 0 && abserr > std::max(opts.abs_floor, opts.rel_tol * std::abs(value)))
        throw ConvergenceError(std::string(what) + ": quadrature failed (" +
                               gsl_strerror(status) + ", err=" + std::to_string(abserr) + ")");
    return value;
}

} // namespace

double integrate(const Integrand& f, double a, double b, QuadratureOptions opts) {
    constexpr std::size_t kLimit = 4000;
    Workspace ws(kLimit);
    gsl_function gf{&trampoline, const_cast<Integrand*>(&f)};
    double value = 0.0, abserr = 0.0;
    const int status = gsl_integration_qags(&gf, a, b, opts.abs_floor, opts.rel_tol, kLimit,
                                            ws.w, &value, &abserr);
    return checked(status, value, abserr, opts, "integrate");
}

double integrate_to_infinity(const Integrand& f, double a, QuadratureOptions opts) {
    constexpr std::size_t kLimit = 4000;
    Workspace ws(kLimit);
    gsl_function gf{&trampoline, const_cast<Integrand*>(&f)};
    double value = 0.0, abserr = 0.0;
    const int status = gsl_integration_qagiu(&gf, a, opts.abs_floor, opts.rel_tol, kLimit,
                                             ws.w, &value, &abserr);
    return checked(status, value, abserr, opts, "integrate_to_infinity");
}

namespace {

// Estimate an alternating-tail limit by repeated pairwise averaging of the
// trailing partial sums (Euler-style acceleration): each averaging level
// knocks out one more power of the term decay.
double averaged_limit(const std::vector<double>& partial_sums, std::size_t window) {
    const std::size_t n = std::min(window, partial_sums.size());
    std::vector<double> w(partial_sums.end() - static_cast<std::ptrdiff_t>(n),
                          partial_sums.end());
    while (w.size() > 1) {
        for (std::size_t i = 0; i + 1 < w.size(); ++i) w[i] = 0.5 * (w[i] + w[i + 1]);
        w.pop_back();
    }
    return w[0];
}

} // namespace

double fourier_cosine_integral(const Integrand& g, double x, QuadratureOptions opts) {
    if (!(x > 0.0)) throw DomainError("fourier_cosine_integral: x must be > 0");

    const Integrand integrand = [&g, x](double k) { return std::cos(k * x) * g(k); };
    // Segment quadrature is pushed well below the outer tolerance so the
    // acceleration error dominates.
    QuadratureOptions seg_opts;
    seg_opts.rel_tol = std::min(opts.rel_tol * 1e-3, 1e-9);
    seg_opts.abs_floor = opts.abs_floor * 1e-2;

    const double half_period = 3.14159265358979323846 / x;
    auto zero = [&](std::size_t j) { return (static_cast<double>(j) + 0.5) * half_period; };

    double running = 2.0 * integrate(integrand, 0.0, zero(0), seg_opts);

    constexpr std::size_t kMaxSegments = 400;
    constexpr std::size_t kWindow = 48;
    std::vector<double> partial_sums;
    partial_sums.reserve(kMaxSegments);
    double previous = 0.0;
    int settled = 0;
    for (std::size_t j = 0; j < kMaxSegments; ++j) {
        running += 2.0 * integrate(integrand, zero(j), zero(j + 1), seg_opts);
        partial_sums.push_back(running);
        if (j < 8) continue;
        const double estimate = averaged_limit(partial_sums, kWindow);
        const double tol = std::max(opts.abs_floor, opts.rel_tol * std::abs(estimate));
        if (std::abs(estimate - previous) <= 0.5 * tol) {
            if (++settled >= 2) return estimate;
        } else {
            settled = 0;
        }
        previous = estimate;
    }
    throw ConvergenceError("fourier_cosine_integral: tail did not settle within " +
                           std::to_string(kMaxSegments) + " half-periods");
}

} // namespace levyfields
