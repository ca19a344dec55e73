// refcheck.hpp — independent reference computations used by the validation
// suite and the test oracles.  Everything here deliberately avoids the
// production code paths it is used to check: fixed-step RK4 instead of
// closed forms, composite Simpson instead of adaptive Gauss-Kronrod,
// elementary series instead of the continued fraction.

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace qmirror::refcheck {

using cplx = std::complex<double>;
inline constexpr double ref_pi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// ODE oracles
// ---------------------------------------------------------------------------

// Fixed-step RK4 for q'' + 2 gamma q' + omega_r^2 q = drive(t), complex state.
// Returns (q, q') at time T.
inline std::pair<cplx, cplx> rk4_oscillator(double gamma, double omega_r, double T, double h,
                                            const std::function<cplx(double)>& drive,
                                            cplx q0 = {0.0, 0.0}, cplx p0 = {0.0, 0.0}) {
    const auto rhs = [&](double t, cplx q, cplx p) -> std::pair<cplx, cplx> {
        return {p, -2.0 * gamma * p - omega_r * omega_r * q + drive(t)};
    };
    cplx q = q0, p = p0;
    const long n = std::lround(T / h);
    double t = 0.0;
    for (long i = 0; i < n; ++i) {
        const auto [k1q, k1p] = rhs(t, q, p);
        const auto [k2q, k2p] = rhs(t + h / 2, q + h / 2 * k1q, p + h / 2 * k1p);
        const auto [k3q, k3p] = rhs(t + h / 2, q + h / 2 * k2q, p + h / 2 * k2p);
        const auto [k4q, k4p] = rhs(t + h, q + h * k3q, p + h * k3p);
        q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        t += h;
    }
    return {q, p};
}

// Delay-ODE oracle: q'' + 2 gamma q' + omega_r^2 q = -(2 gamma/L) theta(t-L) q(t-L)
// integrated by RK4 with a cubic-Hermite history buffer.  Returns q on the
// grid t_j = j*h up to T.
inline std::vector<cplx> rk4_delay_oscillator(double gamma, double omega_r, double L, double T,
                                              double h, cplx q0, cplx p0) {
    const long n = std::lround(T / h);
    std::vector<cplx> qs(static_cast<std::size_t>(n) + 1), ps(static_cast<std::size_t>(n) + 1);
    qs[0] = q0;
    ps[0] = p0;

    auto history = [&](double t, long known) -> cplx {
        if (t < 0.0) return {0.0, 0.0};
        const double x = t / h;
        long j = static_cast<long>(x);
        if (j >= known) j = known - 1;
        const double s = x - static_cast<double>(j);
        const cplx qa = qs[static_cast<std::size_t>(j)], qb = qs[static_cast<std::size_t>(j) + 1];
        const cplx pa = ps[static_cast<std::size_t>(j)], pb = ps[static_cast<std::size_t>(j) + 1];
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * qa + (s3 - 2 * s2 + s) * h * pa +
               (-2 * s3 + 3 * s2) * qb + (s3 - s2) * h * pb;
    };

    for (long i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * h;
        auto rhs = [&](double tt, cplx q, cplx p) -> std::pair<cplx, cplx> {
            cplx delay{0.0, 0.0};
            if (tt >= L) delay = -(2.0 * gamma / L) * history(tt - L, i + 1);
            return {p, -2.0 * gamma * p - omega_r * omega_r * q + delay};
        };
        cplx q = qs[static_cast<std::size_t>(i)], p = ps[static_cast<std::size_t>(i)];
        const auto [k1q, k1p] = rhs(t, q, p);
        const auto [k2q, k2p] = rhs(t + h / 2, q + h / 2 * k1q, p + h / 2 * k1p);
        const auto [k3q, k3p] = rhs(t + h / 2, q + h / 2 * k2q, p + h / 2 * k2p);
        const auto [k4q, k4p] = rhs(t + h, q + h * k3q, p + h * k3p);
        qs[static_cast<std::size_t>(i) + 1] = q + h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        ps[static_cast<std::size_t>(i) + 1] = p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    }
    return qs;
}

// ---------------------------------------------------------------------------
// Quadrature oracles
// ---------------------------------------------------------------------------

// Composite Simpson with n panels (n rounded up to even).
inline double simpson(const std::function<double(double)>& f, double a, double b, long n) {
    if (n % 2) ++n;
    const double h = (b - a) / static_cast<double>(n);
    double acc = f(a) + f(b);
    for (long i = 1; i < n; ++i) acc += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

// ---------------------------------------------------------------------------
// Special-function oracles
// ---------------------------------------------------------------------------

// E1(x) for real x > 0 by a fixed 40-term power series in extended precision.
inline double e1_series_reference(double x) {
    if (!(x > 0.0 && x <= 8.0))
        throw std::domain_error("e1_series_reference: series oracle valid for 0 < x <= 8");
    long double sum = 0.0L, term = 1.0L;
    for (int n = 1; n <= 40; ++n) {
        term *= -static_cast<long double>(x) / n;
        sum += term / n;
    }
    return static_cast<double>(-0.577215664901532860606512L - std::log(static_cast<long double>(x)) - sum);
}

// Ci and Si by their power series (small/moderate x) or by the auxiliary
// f/g asymptotic expansions (large x).
inline double cosine_integral(double x) {
    if (x <= 0.0) throw std::domain_error("cosine_integral: x must be > 0");
    if (x <= 24.0) {
        long double sum = 0.0L, term = 1.0L;  // sum (-x^2)^k / (2k (2k)!)
        const long double x2 = static_cast<long double>(x) * x;
        for (int k = 1; k <= 60; ++k) {
            term *= -x2 / ((2.0L * k - 1.0L) * (2.0L * k));
            sum += term / (2.0L * k);
        }
        return static_cast<double>(0.577215664901532860606512L +
                                   std::log(static_cast<long double>(x)) + sum);
    }
    // Ci(x) = f(x) sin x - g(x) cos x with asymptotic f, g
    long double f = 0.0L, g = 0.0L, tf = 1.0L / x, tg = 1.0L / (x * static_cast<long double>(x));
    for (int k = 0; k < 12; ++k) {
        f += tf;
        g += tg;
        tf *= -(2.0L * k + 1.0L) * (2.0L * k + 2.0L) / (static_cast<long double>(x) * x);
        tg *= -(2.0L * k + 2.0L) * (2.0L * k + 3.0L) / (static_cast<long double>(x) * x);
    }
    return static_cast<double>(f * std::sin(static_cast<long double>(x)) -
                               g * std::cos(static_cast<long double>(x)));
}

inline double sine_integral(double x) {
    if (x < 0.0) return -sine_integral(-x);
    if (x <= 24.0) {
        long double sum = 0.0L, term = static_cast<long double>(x);
        const long double x2 = static_cast<long double>(x) * x;
        sum = term;
        for (int k = 1; k <= 60; ++k) {
            term *= -x2 / ((2.0L * k) * (2.0L * k + 1.0L));
            sum += term / (2.0L * k + 1.0L);
        }
        return static_cast<double>(sum);
    }
    long double f = 0.0L, g = 0.0L, tf = 1.0L / x, tg = 1.0L / (x * static_cast<long double>(x));
    for (int k = 0; k < 12; ++k) {
        f += tf;
        g += tg;
        tf *= -(2.0L * k + 1.0L) * (2.0L * k + 2.0L) / (static_cast<long double>(x) * x);
        tg *= -(2.0L * k + 2.0L) * (2.0L * k + 3.0L) / (static_cast<long double>(x) * x);
    }
    return static_cast<double>(ref_pi / 2.0L -
                               f * std::cos(static_cast<long double>(x)) -
                               g * std::sin(static_cast<long double>(x)));
}

// Gamma(0, i x) = -Ci(x) + i (Si(x) - pi/2) for real x > 0.
inline cplx gamma0_imag_axis(double x) {
    return {-cosine_integral(x), sine_integral(x) - ref_pi / 2.0};
}

// ---------------------------------------------------------------------------
// Angular-reduction oracle
// ---------------------------------------------------------------------------

// Brute-force 2D angular quadrature of the half-space mode density: the
// integral of sin^2(omega L cos(theta)/2) over the half sphere, with the
// (2 pi)^-3 measure and the 1/(2 omega) mode factor, i.e.
//   omega^2/(2 omega (2 pi)^3) * int_0^{2pi} dphi int_0^{pi/2} sin th dth sin^2(...).
// Up to one global constant (recorded by the caller) this reproduces the
// (1 - sinc omega L) weight.
inline double angular_weight_oracle(double omega, double L, long n_theta = 4000) {
    double acc = 0.0;
    const double h = (ref_pi / 2.0) / static_cast<double>(n_theta);
    for (long i = 0; i <= n_theta; ++i) {
        const double th = h * static_cast<double>(i);
        const double s = std::sin(omega * L * std::cos(th) / 2.0);
        const double f = std::sin(th) * s * s;
        acc += (i == 0 || i == n_theta) ? 0.5 * f : f;
    }
    acc *= h * 2.0 * ref_pi;  // phi integral
    return omega * omega / (2.0 * omega) * acc / std::pow(2.0 * ref_pi, 3.0);
}

// OLS slope helper for scaling fits done oracle-side.
inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace qmirror::refcheck
