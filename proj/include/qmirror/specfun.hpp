// specfun.hpp — special functions for the closed-form results: the complex
// exponential integral Gamma(0, z) (= E1(z)) on the principal branch, and
// the normalized sinc kernel.

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

namespace qmirror::specfun {

inline constexpr double euler_gamma = 0.57721566490153286061;

// sin(x)/x with the removable singularity handled by a Taylor expansion.
inline double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

namespace detail {

// Power series E1(z) = -gamma_E - ln z - sum_{n>=1} (-z)^n / (n n!).
// Good for |z| <= 4 on the principal branch.
inline std::complex<double> e1_series(std::complex<double> z) {
    std::complex<double> sum = 0.0;
    std::complex<double> term = 1.0;  // (-z)^n / n!
    for (int n = 1; n <= 120; ++n) {
        term *= -z / static_cast<double>(n);
        const std::complex<double> contrib = term / static_cast<double>(n);
        sum += contrib;
        if (std::abs(contrib) < 1e-17 * (1.0 + std::abs(sum))) break;
    }
    return -euler_gamma - std::log(z) - sum;
}

// Modified Lentz evaluation of the continued fraction
//   E1(z) = e^{-z} / (z + 1 - 1^2/(z + 3 - 2^2/(z + 5 - ...))).
inline std::complex<double> e1_continued_fraction(std::complex<double> z) {
    const double tiny = 1e-300;
    std::complex<double> b = z + 1.0;
    std::complex<double> c = 1.0 / tiny;
    std::complex<double> d = 1.0 / b;
    std::complex<double> f = d;
    for (int k = 1; k <= 400; ++k) {
        const std::complex<double> a = -static_cast<double>(k) * static_cast<double>(k);
        b += 2.0;
        d = b + a * d;
        if (std::abs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const std::complex<double> delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-z) * f;
}

} // namespace detail

// Gamma(0, z) = E1(z) = int_z^inf e^{-t}/t dt, principal branch.
// Valid for z != 0 with Re(z) >= 0 (all uses sit on or right of the
// imaginary axis, away from the cut on the negative real axis).
inline std::complex<double> gamma0(std::complex<double> z) {
    if (z == std::complex<double>(0.0, 0.0))
        throw std::domain_error("gamma0: z = 0 is a logarithmic singularity");
    if (std::abs(z) <= 4.0) return detail::e1_series(z);
    return detail::e1_continued_fraction(z);
}

// e^{z} Gamma(0, z): the combination entering every mirror closed form
// (the exponentials cancel, leaving a smooth non-oscillatory function).
inline std::complex<double> exp_gamma0(std::complex<double> z) {
    if (std::abs(z) <= 4.0) return std::exp(z) * detail::e1_series(z);
    // fold e^z into the continued fraction: e^z * e^{-z} = 1
    const double tiny = 1e-300;
    std::complex<double> b = z + 1.0;
    std::complex<double> c = 1.0 / tiny;
    std::complex<double> d = 1.0 / b;
    std::complex<double> f = d;
    for (int k = 1; k <= 400; ++k) {
        const std::complex<double> a = -static_cast<double>(k) * static_cast<double>(k);
        b += 2.0;
        d = b + a * d;
        if (std::abs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const std::complex<double> delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return f;
}

} // namespace qmirror::specfun
