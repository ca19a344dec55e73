// late.hpp — late-time stationary covariance and entanglement: frequency-
// domain response functions for free space and half space, exact cutoff
// integrals, closed forms, first-order mirror corrections, and the
// dissipation/noise kernels of the equivalent quantum Langevin equation.

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qmirror/core.hpp"
#include "qmirror/diag.hpp"
#include "qmirror/quad.hpp"
#include "qmirror/specfun.hpp"

namespace qmirror::late {

using cplx = std::complex<double>;
inline constexpr cplx iu{0.0, 1.0};

enum class Geometry { free_space, half_space };

inline const char* to_string(Geometry g) {
    return g == Geometry::free_space ? "free" : "half_space";
}

// D(w) = omega_tilde^2 - (w + i gamma)^2 = omega_r^2 - w^2 - 2 i gamma w,
// the inverse free response up to the mass factor.
inline cplx inverse_response_free(double omega, const SystemParams& p) {
    const cplx u = omega + iu * p.gamma;
    const double wt = p.omega_tilde();
    return wt * wt - u * u;
}

// Image (delay) term of the half-space response denominator.
inline cplx image_term(double omega, const SystemParams& p) {
    return 2.0 * p.gamma * std::exp(iu * omega * p.distance) / p.distance;
}

// Retarded response G(w) = (1/M) [omega_tilde^2 - (w + i gamma)^2]^{-1}.
inline cplx green_free(double omega, const SystemParams& p) {
    return 1.0 / (p.mass * inverse_response_free(omega, p));
}

// Half-space response: the extra 2 gamma e^{i w L}/L is the contribution of
// the oscillator's mirror image.
inline cplx green_half(double omega, const SystemParams& p) {
    return 1.0 / (p.mass * (inverse_response_free(omega, p) + image_term(omega, p)));
}

// First-order expansion of the half-space response in the image term is
// trustworthy only while the image term stays small against the restoring
// term.
inline bool half_space_perturbative_valid(const SystemParams& p) {
    return 2.0 * p.gamma / p.distance <= 0.1 * p.omega_r * p.omega_r;
}

// Frequency response with its geometry tag and originating parameters.
struct FrequencyResponse {
    std::function<cplx(double)> g;
    Geometry geometry = Geometry::free_space;
    SystemParams params;
};

inline FrequencyResponse make_free_response(const SystemParams& p) {
    p.validate();
    return {[p](double w) { return green_free(w, p); }, Geometry::free_space, p};
}

inline FrequencyResponse make_half_response(const SystemParams& p) {
    p.validate();
    if (!half_space_perturbative_valid(p)) {
        std::ostringstream os;
        os << "half-space image term 2*gamma/L = " << 2.0 * p.gamma / p.distance
           << " exceeds 0.1*omega_r^2; first-order mirror results unreliable";
        diag::warn(os.str());
    }
    return {[p](double w) { return green_half(w, p); }, Geometry::half_space, p};
}

struct LateOptions {
    double rel_tol = 1e-9;
    long max_evals = 8'000'000;
};

namespace detail {

inline quad::IntegrandHints late_hints(const SystemParams& p, Geometry geom) {
    quad::IntegrandHints h;
    h.resonance_centers = {p.omega_tilde()};
    h.resonance_width = std::max(p.gamma, 1e-8);
    if (geom == Geometry::half_space) h.oscillation_period = 2.0 * pi / p.distance;
    return h;
}

} // namespace detail

// Stationary covariance from the spectral representation:
//   V_QQ = (1/pi) int_0^Lambda Im G(w) dw,
//   V_PP = (M^2/pi) int_0^Lambda w^2 Im G(w) dw,   V_QP = 0.
inline CovarianceMatrix v_late_exact(const FrequencyResponse& resp, const SystemParams& p,
                                     const LateOptions& opt = {}) {
    const double cutoff = p.cutoff_or_default();
    auto f = [&resp](double w) -> std::array<double, 2> {
        const double im = std::imag(resp.g(w));
        return {im, w * w * im};
    };
    const auto r = quad::integrate_batch<2>(f, 0.0, cutoff, detail::late_hints(p, resp.geometry),
                                            opt.rel_tol, opt.max_evals);
    CovarianceMatrix v;
    v.vqq = r.value[0] / pi;
    v.vpp = p.mass * p.mass * r.value[1] / pi;
    v.vqp = 0.0;  // stationarity
    return v;
}

// Free-space closed forms.  V_QQ comes from the principal-branch complex
// logarithm (its imaginary residue is asserted small, then discarded);
// the V_PP cutoff term is 2 ln(Lambda/omega_tilde), the large-Lambda limit
// of the exact antiderivative.
inline CovarianceMatrix v_free_closed(const SystemParams& p) {
    const double wt = p.omega_tilde();
    const double g = p.gamma;
    const double cutoff = p.cutoff_or_default();
    const cplx log_ratio = std::log((g - iu * wt) / (g + iu * wt));

    const cplx vqq_c = iu / (2.0 * pi * p.mass * wt) * log_ratio;
    if (std::abs(vqq_c.imag()) > 1e-14 * std::abs(vqq_c.real()) + 1e-300)
        throw std::runtime_error("v_free_closed: V_QQ branch produced a complex value");

    const cplx vpp_log = iu / (2.0 * pi * wt) * (wt * wt - g * g) * log_ratio;
    const double vpp_cut = g / pi * (2.0 * std::log(cutoff / wt) - std::log1p(g * g / (wt * wt)));
    return {vqq_c.real(), p.mass * (vpp_log.real() + vpp_cut), 0.0};
}

// Weak-coupling expansion of the free-space covariance.
inline CovarianceMatrix v_free_perturbative(const SystemParams& p) {
    const double wt = p.omega_tilde();
    const double g = p.gamma;
    const double cutoff = p.cutoff_or_default();
    CovarianceMatrix v;
    v.vqq = 1.0 / (2.0 * p.mass * wt) * (1.0 - 2.0 * g / (pi * wt));
    v.vpp = p.mass * (wt / 2.0 + g / pi * (2.0 * (std::log(cutoff) - std::log(wt)) -
                                           wt * wt / (cutoff * cutoff) - 1.0));
    v.vqp = 0.0;
    return v;
}

struct DeltaV {
    double dvqq = 0.0;
    double dvpp = 0.0;
};

// Closed-form first-order mirror corrections (large-cutoff, leading order in
// gamma).  gamma0_scale is a validation hook: it multiplies the
// Gamma(0, i omega_r L) factor and must be 1 in production use.
inline DeltaV delta_v(const SystemParams& p, double gamma0_scale = 1.0) {
    if (!(p.distance > 0.0)) throw std::domain_error("delta_v: L must be > 0");
    const double x = p.omega_r * p.distance;
    const cplx w = specfun::exp_gamma0(iu * x) * gamma0_scale;
    const double om = p.omega_r;
    const double L = p.distance;
    DeltaV d;
    d.dvqq = -(1.0 / pi) * (1.0 / (p.mass * om)) * (p.gamma / L) *
             std::real((iu / (om * om) + L / om) * w);
    d.dvpp = -(p.mass * p.gamma / (pi * om * L)) * std::real((-iu + L * om) * w);
    return d;
}

// The same corrections by direct quadrature of the defining first-order
// integrands  -(1/pi M) int Im[kappa G0^2 M^2] {1, w^2} dw  up to `upper`.
inline DeltaV delta_v_integral(const SystemParams& p, double upper = 1e5,
                               const LateOptions& opt = {.rel_tol = 1e-9,
                                                         .max_evals = 40'000'000}) {
    auto f = [&p](double w) -> std::array<double, 2> {
        const cplx h0 = 1.0 / inverse_response_free(w, p);
        const double im = std::imag(image_term(w, p) * h0 * h0);
        return {im, w * w * im};
    };
    auto hints = detail::late_hints(p, Geometry::half_space);
    const auto r = quad::integrate_batch<2>(f, 0.0, upper, hints, opt.rel_tol, opt.max_evals,
                                            1e-16);
    return {-r.value[0] / (pi * p.mass), -p.mass * r.value[1] / pi};
}

// Change of the stationary linear entropy due to the mirror,
// Delta S_L = -(2/pi)(gamma/omega_r) Re[e^{i omega_r L} Gamma(0, i omega_r L)].
// Diverges logarithmically to -infinity as L -> 0.
inline double delta_s_linear(const SystemParams& p, double gamma0_scale = 1.0) {
    const double x = p.omega_r * p.distance;
    const cplx w = specfun::exp_gamma0(iu * x) * gamma0_scale;
    return -(2.0 / pi) * (p.gamma / p.omega_r) * std::real(w);
}

// Stationary entropy for the chosen geometry.
inline EntropyReport s_late(const SystemParams& p, Geometry geom, const LateOptions& opt = {}) {
    const auto resp = geom == Geometry::free_space ? make_free_response(p)
                                                   : make_half_response(p);
    return linear_entropy(v_late_exact(resp, p, opt));
}

// ---------------------------------------------------------------------------
// Langevin-equation kernels
// ---------------------------------------------------------------------------

// Spectral weight I(omega) of the field seen by the oscillator, without the
// lambda^2 factor: free space omega/(4 pi^2); half space carries the
// (1 - sinc omega L) mirror signature with the same normalization so that
// the half-space kernels reduce to the free ones as L -> infinity and the
// fluctuation-dissipation identity below holds exactly.
inline double spectral_weight(double omega, const SystemParams& p, Geometry geom) {
    const double self = omega / (4.0 * pi * pi);
    if (geom == Geometry::free_space) return self;
    return self * (1.0 - specfun::sinc(omega * p.distance));
}

// Re gamma(omega) reconstructed from I(omega) = (2/pi) omega M Re gamma.
inline double damping_rate_real(double omega, const SystemParams& p, Geometry geom) {
    const double lam = p.lambda_coupling();
    return pi * lam * lam * spectral_weight(omega, p, geom) / (2.0 * omega * p.mass);
}

struct KernelSamples {
    std::vector<double> tau;
    std::vector<double> mu;  // dissipation kernel; causal (0 for tau < 0)
    std::vector<double> nu;  // noise kernel; even in tau
};

// mu(tau) = lambda^2 int_0^Lambda I(w) sin(w tau) dw,
// nu(tau) = lambda^2 int_0^Lambda I(w) cos(w tau) dw.
inline KernelSamples qbm_kernels(const std::vector<double>& tau_grid, const SystemParams& p,
                                 Geometry geom, const LateOptions& opt = {}) {
    const double cutoff = p.cutoff_or_default();
    const double lam2 = p.lambda_coupling() * p.lambda_coupling();
    KernelSamples out;
    out.tau = tau_grid;
    out.mu.reserve(tau_grid.size());
    out.nu.reserve(tau_grid.size());
    for (double tau : tau_grid) {
        quad::IntegrandHints h;
        if (std::abs(tau) > 0.0) h.oscillation_period = 2.0 * pi / std::abs(tau);
        auto f = [&](double w) -> std::array<double, 2> {
            const double I = spectral_weight(w, p, geom);
            return {I * std::sin(w * tau), I * std::cos(w * std::abs(tau))};
        };
        const auto r = quad::integrate_batch<2>(f, 0.0, cutoff, h, opt.rel_tol, opt.max_evals,
                                                1e-10 * cutoff * cutoff);
        out.mu.push_back(tau < 0.0 ? 0.0 : lam2 * r.value[0]);
        out.nu.push_back(lam2 * r.value[1]);
    }
    return out;
}

} // namespace qmirror::late
