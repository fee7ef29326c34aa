#include "levyfields/kernel.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "levyfields/bessel.hpp"
#include "levyfields/errors.hpp"
#include "levyfields/parallel.hpp"
#include "levyfields/quadrature.hpp"

namespace levyfields {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;
} // namespace

void KernelSpec::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("KernelSpec: alpha must be in (0, 1]");
    if (!(m0 > 0.0)) throw DomainError("KernelSpec: m0 must be > 0");
    if (d < 1) throw DomainError("KernelSpec: dimension must be >= 1");
}

double fourier_multiplier_ksq(const KernelSpec& spec, double k_sq) {
    return std::pow(k_sq + spec.m0 * spec.m0, -spec.alpha);
}

double fourier_multiplier(const KernelSpec& spec, const std::vector<double>& k) {
    spec.validate();
    if (static_cast<int>(k.size()) != spec.d)
        throw DomainError("fourier_multiplier: momentum dimension mismatch");
    double k_sq = 0.0;
    for (double c : k) k_sq += c * c;
    return fourier_multiplier_ksq(spec, k_sq);
}

// ---- FFT plumbing ----------------------------------------------------------

namespace {

// FFTW's planner is not thread-safe; plans are cached per (d, padded size)
// under a mutex and then executed concurrently on per-call buffers (new-array
// execution, which is thread-safe).  FFTW_ESTIMATE keeps planning cheap and
// deterministic; FFTW_UNALIGNED lets plans run on any buffer.
struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

PlanPair fft_plans(int d, int m) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, PlanPair> cache;
    std::lock_guard<std::mutex> lock(mutex);
    const auto key = std::make_pair(d, m);
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    std::vector<int> dims(static_cast<std::size_t>(d), m);
    std::size_t real_count = 1, cplx_count = 1;
    for (int a = 0; a < d - 1; ++a) {
        real_count *= static_cast<std::size_t>(m);
        cplx_count *= static_cast<std::size_t>(m);
    }
    real_count *= static_cast<std::size_t>(m);
    cplx_count *= static_cast<std::size_t>(m / 2 + 1);

    std::vector<double> rbuf(real_count);
    std::vector<std::complex<double>> cbuf(cplx_count);
    PlanPair plans;
    plans.forward = fftw_plan_dft_r2c(d, dims.data(), rbuf.data(),
                                      reinterpret_cast<fftw_complex*>(cbuf.data()),
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.backward = fftw_plan_dft_c2r(d, dims.data(),
                                       reinterpret_cast<fftw_complex*>(cbuf.data()),
                                       rbuf.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plans.forward || !plans.backward) throw Error("convolve: FFTW planning failed");
    cache[key] = plans;
    return plans;
}

// Flat index of an original-lattice site inside the padded grid, keeping its
// signed coordinates.
std::size_t padded_index(const LatticeSpec& spec, const int* idx, int m) {
    std::size_t flat = 0;
    for (int a = 0; a < spec.d; ++a) {
        const int s = spec.signed_index(idx[a]);
        const int p = s >= 0 ? s : s + m;
        flat = flat * static_cast<std::size_t>(m) + static_cast<std::size_t>(p);
    }
    return flat;
}

// Squared momentum of a half-spectrum entry; the last axis is halved by the
// real transform, the others wrap at m/2.
double padded_ksq(std::size_t cplx_flat, int d, int m, double delta) {
    const double dk = kTwoPi / (m * delta);
    const std::size_t last = static_cast<std::size_t>(m / 2 + 1);
    double k_sq = 0.0;
    int idx_last = static_cast<int>(cplx_flat % last);
    k_sq += (dk * idx_last) * (dk * idx_last);
    cplx_flat /= last;
    for (int a = d - 2; a >= 0; --a) {
        int idx = static_cast<int>(cplx_flat % static_cast<std::size_t>(m));
        cplx_flat /= static_cast<std::size_t>(m);
        if (idx > m / 2) idx -= m;
        k_sq += (dk * idx) * (dk * idx);
    }
    return k_sq;
}

} // namespace

LatticeField convolve(const KernelSpec& spec, const LatticeField& f) {
    spec.validate();
    if (spec.d != f.spec.d)
        throw LatticeMismatch("convolve: kernel and lattice dimensions differ");
    const int d = spec.d;
    const int m = 2 * f.spec.n_per_axis;

    std::size_t real_count = 1;
    for (int a = 0; a < d; ++a) real_count *= static_cast<std::size_t>(m);
    std::size_t cplx_count = real_count / static_cast<std::size_t>(m) *
                             static_cast<std::size_t>(m / 2 + 1);

    std::vector<double> real_buf(real_count, 0.0);
    std::vector<std::complex<double>> cplx_buf(cplx_count);

    std::vector<int> idx(static_cast<std::size_t>(d));
    for (std::size_t flat = 0; flat < f.size(); ++flat) {
        f.spec.decode(flat, idx.data());
        real_buf[padded_index(f.spec, idx.data(), m)] = f[flat];
    }

    const PlanPair plans = fft_plans(d, m);
    fftw_execute_dft_r2c(plans.forward, real_buf.data(),
                         reinterpret_cast<fftw_complex*>(cplx_buf.data()));
    const double delta = f.spec.delta;
    parallel_for(cplx_count, [&](std::size_t ci) {
        cplx_buf[ci] *= fourier_multiplier_ksq(spec, padded_ksq(ci, d, m, delta));
    });
    fftw_execute_dft_c2r(plans.backward, reinterpret_cast<fftw_complex*>(cplx_buf.data()),
                         real_buf.data());

    LatticeField out(f.spec);
    const double norm = 1.0 / static_cast<double>(real_count);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        f.spec.decode(flat, idx.data());
        out[flat] = real_buf[padded_index(f.spec, idx.data(), m)] * norm;
    }
    return out;
}

LatticeField convolve_reference(const KernelSpec& spec, const LatticeField& f) {
    spec.validate();
    if (spec.d != f.spec.d)
        throw LatticeMismatch("convolve_reference: kernel and lattice dimensions differ");
    const int d = spec.d;
    const int m = 2 * f.spec.n_per_axis;
    std::size_t real_count = 1;
    for (int a = 0; a < d; ++a) real_count *= static_cast<std::size_t>(m);
    if (real_count > 65536)
        throw SizeError("convolve_reference: padded grid too large for direct summation");

    std::vector<double> real_buf(real_count, 0.0);
    std::vector<int> idx(static_cast<std::size_t>(d));
    for (std::size_t flat = 0; flat < f.size(); ++flat) {
        f.spec.decode(flat, idx.data());
        real_buf[padded_index(f.spec, idx.data(), m)] = f[flat];
    }

    // Twiddle table e^{-2 pi i t / m}.
    std::vector<std::complex<double>> twiddle(static_cast<std::size_t>(m));
    for (int t = 0; t < m; ++t)
        twiddle[static_cast<std::size_t>(t)] =
            std::polar(1.0, -kTwoPi * static_cast<double>(t) / static_cast<double>(m));

    auto decode_padded = [&](std::size_t flat, int* out_idx) {
        for (int a = d - 1; a >= 0; --a) {
            out_idx[a] = static_cast<int>(flat % static_cast<std::size_t>(m));
            flat /= static_cast<std::size_t>(m);
        }
    };

    const double dk = kTwoPi / (m * f.spec.delta);
    std::vector<std::complex<double>> freq(real_count);
    std::vector<int> jdx(static_cast<std::size_t>(d)), xdx(static_cast<std::size_t>(d));
    for (std::size_t j = 0; j < real_count; ++j) {
        decode_padded(j, jdx.data());
        std::complex<double> sum = 0.0;
        for (std::size_t x = 0; x < real_count; ++x) {
            if (real_buf[x] == 0.0) continue;
            decode_padded(x, xdx.data());
            long phase = 0;
            for (int a = 0; a < d; ++a)
                phase += static_cast<long>(jdx[static_cast<std::size_t>(a)]) *
                         xdx[static_cast<std::size_t>(a)];
            sum += real_buf[x] * twiddle[static_cast<std::size_t>(phase % m)];
        }
        double k_sq = 0.0;
        for (int a = 0; a < d; ++a) {
            int fi = jdx[static_cast<std::size_t>(a)];
            if (fi > m / 2) fi -= m;
            k_sq += (dk * fi) * (dk * fi);
        }
        freq[j] = sum * fourier_multiplier_ksq(spec, k_sq);
    }

    LatticeField out(f.spec);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        f.spec.decode(flat, idx.data());
        const std::size_t target = padded_index(f.spec, idx.data(), m);
        decode_padded(target, xdx.data());
        std::complex<double> sum = 0.0;
        for (std::size_t j = 0; j < real_count; ++j) {
            decode_padded(j, jdx.data());
            long phase = 0;
            for (int a = 0; a < d; ++a)
                phase += static_cast<long>(jdx[static_cast<std::size_t>(a)]) *
                         xdx[static_cast<std::size_t>(a)];
            sum += freq[j] * std::conj(twiddle[static_cast<std::size_t>(phase % m)]);
        }
        out[flat] = sum.real() / static_cast<double>(real_count);
    }
    return out;
}

// ---- position-space kernel -------------------------------------------------

double free_covariance_radial(double m, int d, double r) {
    if (!(m > 0.0)) throw DomainError("free_covariance: mass must be > 0");
    if (d < 1) throw DomainError("free_covariance: dimension must be >= 1");
    if (!(r > 0.0)) throw DomainError("free_covariance: radius must be > 0");
    if (d == 1) return std::exp(-m * r) / (2.0 * m);
    if (d == 3) return std::exp(-m * r) / (4.0 * kPi * r);
    const double half = 0.5 * (d - 2);
    return std::pow(kTwoPi, -0.5 * d) * std::pow(m / r, half) * bessel_k(half, m * r);
}

double free_covariance(double m, int d, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != d)
        throw DomainError("free_covariance: point dimension mismatch");
    double r_sq = 0.0;
    for (double c : x) r_sq += c * c;
    return free_covariance_radial(m, d, std::sqrt(r_sq));
}

double rho_alpha(double alpha, double m0, double m_sq) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("rho_alpha: alpha must be in (0, 1)");
    if (!(m0 > 0.0)) throw DomainError("rho_alpha: m0 must be > 0");
    const double excess = m_sq - m0 * m0;
    if (excess <= 0.0) return 0.0;
    return 2.0 * std::sin(kPi * alpha) * std::pow(excess, -alpha);
}

double kernel_position_radial(const KernelSpec& spec, double r) {
    spec.validate();
    if (!(spec.alpha < 1.0))
        throw DomainError("kernel_position: the mass-integral route needs alpha in (0, 1)");
    if (!(r > 0.0)) throw DomainError("kernel_position: radius must be > 0");
    const double a = spec.alpha;
    const double m0_sq = spec.m0 * spec.m0;
    // Substituting u = (m^2 - m0^2)^{1-alpha} absorbs the endpoint
    // singularity of the mass density: the Jacobian cancels it exactly,
    // leaving Int_0^inf C_{m(u)}(r) du times the constant below.
    const double prefactor = 2.0 * std::sin(kPi * a) / (1.0 - a);
    const double power = 1.0 / (1.0 - a);
    const Integrand integrand = [&](double u) {
        const double mass = std::sqrt(m0_sq + std::pow(u, power));
        return free_covariance_radial(mass, spec.d, r);
    };
    return prefactor * integrate_to_infinity(integrand, 0.0);
}

double kernel_position(const KernelSpec& spec, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != spec.d)
        throw DomainError("kernel_position: point dimension mismatch");
    double r_sq = 0.0;
    for (double c : x) r_sq += c * c;
    return kernel_position_radial(spec, std::sqrt(r_sq));
}

} // namespace levyfields
